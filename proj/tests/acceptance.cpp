// Acceptance suite: one line per criterion, non-zero exit when any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bechdel/cli.hpp"
#include "bechdel/metrics.hpp"
#include "bechdel/screenplay.hpp"
#include "bechdel/segmentation.hpp"
#include "bechdel/stats.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace bechdel;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Metric values against the linear-scan reference.
Outcome metric_oracle() {
  Rng rng(20120101);
  const auto t0 = Clock::now();
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dialogues = oracle::random_dialogues(rng, 500);
    const std::uint64_t min_aligned = rng.below(60);
    const auto want = oracle::brute_metrics(dialogues, min_aligned);
    const auto got = compute_report(DialogueSet(dialogues), min_aligned);
    const bool ok = oracle::same(want.bf, got.bechdel_female) &&
                    oracle::same(want.bm, got.bechdel_male) &&
                    oracle::same(want.xf, got.imbalance_female) &&
                    oracle::same(want.xm, got.imbalance_male) &&
                    oracle::same(want.i_f, got.independence_female) &&
                    oracle::same(want.i_m, got.independence_male);
    if (!ok) ++mismatches;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 10.0,
          fmt("1000 sets, %.0f mismatches, %.2f s (limit 10 s)", double(mismatches), t)};
}

// 2. B_F = I_F * |D(F,F,*,*)| / |D| as exact integer ratios.
Outcome decomposition() {
  Rng rng(314);
  std::size_t checked = 0, failed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const DialogueSet ds(oracle::random_dialogues(rng, 500));
    const auto b = bechdel_scores(ds);
    const auto i = gender_independence(ds, 1);
    if (!b.female.defined || !i.female.defined) continue;
    const auto ff = select_count(ds, Pattern::parse("F,F,*,*"));
    const std::uint64_t n = ds.size();
    ++checked;
    if (b.female.numerator * i.female.denominator * n != i.female.numerator * ff * b.female.denominator)
      ++failed;
  }
  return {failed == 0 && checked > 900,
          fmt("%.0f sets checked, %.0f violations", double(checked), double(failed))};
}

// 3. Swapping name genders and the word lists swaps the female and male metrics.
MetricReport run_pipeline(const gen::MessageCorpus& corpus, const std::vector<NameRecord>& names,
                          const TokenSet& male_words, const TokenSet& female_words,
                          bool& fitted) {
  const auto lex = build_lexicon(names);
  const ReferenceLexicon refs(lex, male_words, female_words);
  GenderMap genders;
  for (const auto& p : corpus.profiles) genders[p.user_id] = infer_gender(p.full_name, lex);
  SegmentOptions opt;
  opt.min_mentions = 5;
  SegmentResult seg;
  try {
    seg = segment_corpus(corpus.messages, genders, refs, opt);
    fitted = true;
  } catch (const FitError&) {
    opt.tau_override = 3600.0;
    seg = segment_corpus(corpus.messages, genders, refs, opt);
    fitted = false;
  }
  return compute_report(DialogueSet(std::move(seg.dialogues)), 1);
}

bool same_ratio(const RatioMetric& a, const RatioMetric& b) {
  return a.defined == b.defined && a.numerator == b.numerator && a.denominator == b.denominator;
}

Outcome gender_swap() {
  const auto& mw = default_male_words();
  const auto& fw = default_female_words();
  const TokenSet male(mw.begin(), mw.end()), female(fw.begin(), fw.end());
  Rng rng(4242);
  std::size_t failed = 0, fitted_runs = 0, nonempty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto corpus = gen::random_message_corpus(rng, 6 + rng.below(10), 1000 + rng.below(2000));
    bool fit_a = false, fit_b = false;
    const auto a = run_pipeline(corpus, gen::name_records(), male, female, fit_a);
    const auto b = run_pipeline(corpus, gen::swap_records(gen::name_records()), female, male, fit_b);
    const bool ok = fit_a == fit_b && a.total == b.total &&
                    same_ratio(a.bechdel_female, b.bechdel_male) &&
                    same_ratio(a.bechdel_male, b.bechdel_female) &&
                    same_ratio(a.independence_female, b.independence_male) &&
                    same_ratio(a.independence_male, b.independence_female);
    if (!ok) ++failed;
    if (fit_a) ++fitted_runs;
    if (a.bechdel_female.numerator > 0 && a.bechdel_male.numerator > 0) ++nonempty;
  }
  return {failed == 0 && nonempty > 50,
          fmt("100 corpora, %.0f asymmetric, %.0f with fitted tau, %.0f with B_F,B_M > 0",
              double(failed), double(fitted_runs), double(nonempty))};
}

// 4. Planted alpha = 1.5, tau = 32768 recovered from 10^4 head + 10^3 tail gaps.
Outcome fit_recovery() {
  const double alpha = 1.5, tau = 32768.0, t_min = 1.0;
  std::size_t failed = 0;
  double worst_time = 0, min_a = 9, max_a = 0, min_tau = 1e12, max_tau = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<double> gaps;
    const double a = 1.0 - alpha;
    const double lo = std::pow(t_min, a), hi = std::pow(tau, a);
    for (int i = 0; i < 10000; ++i) gaps.push_back(std::pow(lo + rng.uniform() * (hi - lo), 1.0 / a));
    for (int i = 0; i < 1000; ++i) gaps.push_back(tau + rng.exponential(tau / 2.0));
    rng.shuffle(gaps);
    const auto t0 = Clock::now();
    FitOptions opt;
    opt.t_min = t_min;
    const auto fit = fit_bimodal(gaps, opt);
    const double t = seconds_since(t0);
    worst_time = std::max(worst_time, t);
    min_a = std::min(min_a, fit.alpha);
    max_a = std::max(max_a, fit.alpha);
    min_tau = std::min(min_tau, fit.tau);
    max_tau = std::max(max_tau, fit.tau);
    const bool ok = std::fabs(fit.alpha - alpha) <= 0.05 && fit.tau >= tau / 1.5 &&
                    fit.tau <= tau * 1.5 && t < 5.0;
    if (!ok) ++failed;
  }
  return {failed == 0, fmt("20 seeds, %.0f out of bounds, alpha in [%.3f, %.3f], ", double(failed),
                           min_a, max_a) +
                           fmt("tau in [%.0f, %.0f], slowest fit %.2f s", min_tau, max_tau, worst_time)};
}

// 5. Dialogue splitting against a direct gap scan, including reference flags.
Outcome split_oracle() {
  const auto lex = ReferenceLexicon::with_default_words(build_lexicon(gen::name_records()));
  const std::set<std::string> male = {"he", "him", "his", "man", "boyfriend", "john", "paul"};
  const std::set<std::string> female = {"she", "her", "hers", "woman", "girlfriend", "mary", "emma"};
  Rng rng(555);
  std::size_t failed = 0, total_dialogues = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const AuthorPair pair{"a", "b"};
    std::vector<Message> stream;
    std::int64_t t = static_cast<std::int64_t>(rng.below(1000000));
    const std::size_t n = rng.below(120);
    const double tau = 1.0 + rng.uniform() * 2000.0;
    for (std::size_t i = 0; i < n; ++i) {
      t += rng.bernoulli(0.1) ? 0 : static_cast<std::int64_t>(rng.exponential(tau));
      stream.push_back({"m" + std::to_string(i), rng.bernoulli(0.5) ? "a" : "b", t,
                        gen::random_text(rng, 0.15), {}});
    }
    const PairGenders genders{oracle::random_gender(rng), oracle::random_gender(rng)};
    std::vector<std::int64_t> times;
    for (const auto& m : stream) times.push_back(m.timestamp);
    const auto runs = oracle::gap_scan(times, tau);
    const auto got = split_stream_dialogues(stream, pair, tau, lex, genders);
    bool ok = got.size() == runs.size();
    for (std::size_t k = 0; ok && k < runs.size(); ++k) {
      std::vector<std::string> ids;
      bool m = false, f = false;
      for (auto i : runs[k]) {
        ids.push_back(stream[i].msg_id);
        std::istringstream words(stream[i].text);
        for (std::string w; words >> w;) {
          m = m || male.count(w);
          f = f || female.count(w);
        }
      }
      const auto& d = got[k];
      ok = d.source_ids == ids && d.m == m && d.f == f && d.g1 == genders.first &&
           d.g2 == genders.second && d.participants.first == "a" && d.participants.second == "b";
    }
    total_dialogues += runs.size();
    if (!ok) ++failed;
  }
  return {failed == 0,
          fmt("500 streams, %.0f mismatches, %.0f dialogues", double(failed), double(total_dialogues))};
}

// 6. Constructed scripts for each rung, and b = 3 <=> B_F > 0 on random scripts.
Outcome classic_ladder() {
  const auto lex = ReferenceLexicon::with_default_words(build_lexicon(gen::name_records()));
  const Gender F = Gender::kFemale, M = Gender::kMale;
  struct Case {
    const char* text;
    CastGenders cast;
    int want;
  };
  const std::vector<Case> ladder = {
      {"INT. OFFICE - DAY\n\nNINA\nMorning.\n\nOSCAR\nMorning. Coffee?\n\nNINA\nPlease.\n",
       {{"NINA", F}, {"OSCAR", M}}, 0},
      {"INT. OFFICE - DAY\n\nNINA\nIs the report done?\n\nOSCAR\nAlmost.\n\n"
       "EXT. STREET - NIGHT\n\nPAULA\nTaxi!\n\nOSCAR\nShare it?\n",
       {{"NINA", F}, {"OSCAR", M}, {"PAULA", F}}, 1},
      {"INT. KITCHEN - DAY\n\nNINA\nDid he call you?\n\nPAULA\nJohn never calls.\n",
       {{"NINA", F}, {"PAULA", F}}, 2},
      {"INT. LAB - NIGHT\n\nNINA\nThe sample is ready.\n\nPAULA\nRun it twice.\n",
       {{"NINA", F}, {"PAULA", F}}, 3},
  };
  std::string got_ladder;
  bool ladder_ok = true;
  for (const auto& c : ladder) {
    const auto ds = build_script_dialogues(parse_script(c.text), c.cast, lex);
    const int b = classic_bechdel(ds, c.cast);
    got_ladder += std::to_string(b);
    ladder_ok = ladder_ok && b == c.want;
  }
  Rng rng(606);
  std::size_t failed = 0;
  std::array<int, 4> seen{};
  for (int trial = 0; trial < 200; ++trial) {
    const auto fixture = gen::random_script(rng);
    const auto ds = build_script_dialogues(parse_script(fixture.text), fixture.cast, lex);
    const int b = classic_bechdel(ds, fixture.cast);
    ++seen[b];
    const bool positive = bechdel_scores(ds).female.numerator > 0;
    if ((b == 3) != positive) ++failed;
  }
  return {ladder_ok && failed == 0,
          "ladder b=" + got_ladder + " (want 0123), " + std::to_string(failed) +
              " violations on 200 scripts (b counts " + std::to_string(seen[0]) + "/" +
              std::to_string(seen[1]) + "/" + std::to_string(seen[2]) + "/" +
              std::to_string(seen[3]) + ")"};
}

// 7. Ann Arbor proportions.
Outcome ann_arbor(const std::string& root) {
  const auto read = read_dialogues(root + "/data/fixtures/ann_arbor_dialogues.jsonl");
  const auto b = bechdel_scores(DialogueSet(read.dialogues));
  const double bf = b.female.value(), bm = b.male.value();
  return {read.malformed == 0 && std::fabs(bf - 0.06) <= 0.005 && std::fabs(bm - 0.36) <= 0.005,
          fmt("B_F=%.4f B_M=%.4f over %.0f dialogues", bf, bm, double(read.dialogues.size()))};
}

// 8. Statistics oracles.
Outcome stats_oracles() {
  Rng rng(808);
  std::size_t rank_cases = 0, rank_failed = 0;
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::size_t na = 1; na < n; ++na) {
      for (int rep = 0; rep < 3; ++rep) {
        const int levels = rep == 0 ? 0 : 2 + rep * 2;
        std::vector<double> a, b;
        auto draw = [&] { return levels ? double(rng.below(levels)) : rng.normal(); };
        for (std::size_t i = 0; i < na; ++i) a.push_back(draw());
        for (std::size_t i = na; i < n; ++i) b.push_back(draw());
        const auto r = wilcoxon_ranksum(a, b);
        const double want = oracle::ranksum_enumeration_p(a, b);
        ++rank_cases;
        if (r.method != Method::kRankSumExact || std::fabs(r.p_value - want) > 1e-12) ++rank_failed;
      }
    }
  }
  std::size_t wilson_cases = 0, wilson_failed = 0;
  double worst = 0;
  for (std::uint64_t n = 1; n <= 200; ++n) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      for (auto [level, z] : {std::pair{0.90, oracle::kZ90}, std::pair{0.95, oracle::kZ95},
                              std::pair{0.99, oracle::kZ99}}) {
        const auto got = wilson_ci(k, n, level);
        const auto want = oracle::wilson_closed_form(k, n, z);
        const double err = std::max(std::fabs(got.first - want.first), std::fabs(got.second - want.second));
        worst = std::max(worst, err);
        ++wilson_cases;
        if (err > 1e-9) ++wilson_failed;
      }
    }
  }
  std::size_t spearman_failed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    std::vector<double> x, y, fx, gy;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(trial % 4 == 0 ? double(rng.below(6)) : rng.normal());
      y.push_back(rng.normal() + (trial % 2 ? 0.5 * x.back() : 0.0));
      fx.push_back(std::exp(x.back() / 2.0) + 7.0);
      gy.push_back(std::atan(y.back()) * 3.0 - 1.0);
    }
    try {
      const auto a = spearman(x, y);
      const auto b = spearman(fx, gy);
      if (std::fabs(a.effect - b.effect) > 1e-12 || std::fabs(a.p_value - b.p_value) > 1e-9)
        ++spearman_failed;
    } catch (const StatsError&) {
      bool also = false;
      try {
        spearman(fx, gy);
      } catch (const StatsError&) {
        also = true;
      }
      if (!also) ++spearman_failed;
    }
  }
  const bool pass = rank_failed == 0 && wilson_failed == 0 && spearman_failed == 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "rank-sum %zu/%zu, Wilson %zu/%zu (max err %.1e), Spearman 1000 cases %zu failed",
                rank_cases - rank_failed, rank_cases, wilson_cases - wilson_failed, wilson_cases,
                worst, spearman_failed);
  return {pass, buf};
}

// 9. Bundled synthetic corpus: identical output across runs and equal to the golden files.
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome golden_run(const std::string& root) {
  const auto base = fs::temp_directory_path() / "bechdel_acceptance_golden";
  fs::remove_all(base);
  const auto old_cwd = fs::current_path();
  fs::current_path(root);
  const auto t0 = Clock::now();
  int codes = 0;
  for (const char* run : {"a", "b"}) {
    std::ostringstream out, err;
    codes += run_cli({"bechdel", "report", "--config", "data/synthetic/run.conf", "--out",
                      (base / run).string()},
                     out, err);
  }
  const double t = seconds_since(t0) / 2.0;
  fs::current_path(old_cwd);
  if (codes != 0) return {false, "report exited non-zero"};

  const auto files = listing(base / "a");
  std::size_t differing = 0;
  if (files != listing(base / "b")) ++differing;
  for (const auto& f : files) {
    if (slurp(base / "a" / f) != slurp(base / "b" / f)) ++differing;
  }
  std::size_t golden_diff = 0, golden_count = 0;
  const fs::path golden = fs::path(root) / "tests" / "golden";
  for (const auto& f : listing(golden)) {
    ++golden_count;
    if (!fs::exists(base / "a" / f) || slurp(base / "a" / f) != slurp(golden / f)) ++golden_diff;
  }

  // The corpus metrics in report.json equal a recount of the written dialogues.
  bool recount_ok = false;
  const auto dialogues = read_dialogues((base / "a" / "stream_dialogues.jsonl").string());
  const auto report = nlohmann::json::parse(slurp(base / "a" / "report.json"));
  const auto want = oracle::brute_metrics(dialogues.dialogues, report["config"]["min_aligned"].get<std::uint64_t>());
  const auto& corpus = report["score"]["corpus"];
  recount_ok = corpus["B_F"]["numerator"] == want.bf.num && corpus["B_F"]["denominator"] == want.bf.den &&
               corpus["I_M"]["numerator"] == want.i_m.num && corpus["I_M"]["denominator"] == want.i_m.den;

  const bool pass = differing == 0 && golden_count > 0 && golden_diff == 0 && recount_ok && t < 30.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu files, %zu differ between runs, %zu/%zu golden files differ, recount %s, %.2f s per run",
                files.size(), differing, golden_diff, golden_count, recount_ok ? "ok" : "MISMATCH", t);
  return {pass, buf};
}

// 10. One million messages through ingest, segmentation and scoring.
Outcome throughput() {
  synth::StreamOptions opt;
  opt.users = 2000;
  opt.target_messages = 1000000;
  opt.seed = 10;
  const auto corpus = synth::make_stream_corpus(opt);
  std::string jsonl;
  jsonl.reserve(corpus.messages.size() * 120);
  for (const auto& m : corpus.messages) {
    jsonl += message_to_json_line(m);
    jsonl += '\n';
  }

  const auto t0 = Clock::now();
  const auto parsed = parse_messages(jsonl);
  const auto stop = synth::stoplist();
  const auto names = build_lexicon(synth::name_table(), TokenSet(stop.begin(), stop.end()));
  GenderMap genders;
  for (const auto& p : corpus.profiles) genders[p.user_id] = infer_gender(p.full_name, names);
  const auto lex = ReferenceLexicon::with_default_words(names);
  SegmentOptions seg_opt;
  seg_opt.fit.t_min = opt.t_min;
  seg_opt.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto seg = segment_corpus(parsed.records, genders, lex, seg_opt);
  const std::size_t n_dialogues = seg.dialogues.size();
  const auto report = compute_report(DialogueSet(seg.dialogues), 50);
  const double t = seconds_since(t0);
  const bool pass = parsed.records.size() >= 1000000 && parsed.rejected.empty() && n_dialogues > 0 &&
                    report.total == n_dialogues && t < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu messages, %zu pairs, %zu dialogues, tau=%.0f, %.2f s on %u thread(s) (limit 60 s)",
                parsed.records.size(), seg.pairs.size(), n_dialogues, seg.tau, t, seg_opt.threads);
  return {pass, buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : BECHDEL_SOURCE_DIR;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"metric oracle", metric_oracle},
      {"decomposition identity", decomposition},
      {"gender-swap symmetry", gender_swap},
      {"segmentation fit recovery", fit_recovery},
      {"splitting oracle", split_oracle},
      {"classic-test ladder", classic_ladder},
      {"Ann Arbor fixture", [&] { return ann_arbor(root); }},
      {"statistics oracles", stats_oracles},
      {"end-to-end golden run", [&] { return golden_run(root); }},
      {"throughput", throughput},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %-26s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
