#include "bechdel/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bechdel/analysis.hpp"
#include "bechdel/csv.hpp"
#include "bechdel/gender.hpp"
#include "bechdel/ingest.hpp"
#include "bechdel/metrics.hpp"
#include "bechdel/parallel.hpp"
#include "bechdel/screenplay.hpp"
#include "bechdel/segmentation.hpp"
#include "bechdel/stats.hpp"

namespace bechdel {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void require_path(const std::string& path) {
  if (!path.empty() && !fs::exists(path)) {
    throw IngestError(IngestError::Kind::kMissing, "missing input: " + path);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) out += csv::join_row(r) + "\n";
  return out;
}

template <typename T>
void warn_rejected(std::ostream& out, const std::string& source, const ReadResult<T>& r) {
  if (r.rejected.empty()) return;
  out << "warning: " << source << ": skipped " << r.rejected.size() << " invalid row(s); first at line "
      << r.rejected.front().line << ": " << r.rejected.front().reason << "\n";
}

// Plain left-aligned text table for stdout.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << line << "\n";
  }
}

struct Lexica {
  GenderLexicon names;
  ReferenceLexicon refs;
};

TokenSet to_set(const std::vector<std::string>& v) { return TokenSet(v.begin(), v.end()); }

Lexica load_lexica(const RunConfig& c, std::ostream& out) {
  GenderLexicon names;
  if (!c.names.empty()) {
    auto records = read_name_records(c.names);
    warn_rejected(out, c.names, records);
    TokenSet stop;
    for (const auto& path : c.stoplists) {
      for (auto& t : read_token_list(path)) stop.insert(std::move(t));
    }
    names = build_lexicon(records.records, stop, c.ratio);
  }
  TokenSet male = c.male_words.empty() ? to_set(default_male_words()) : to_set(read_token_list(c.male_words));
  TokenSet female =
      c.female_words.empty() ? to_set(default_female_words()) : to_set(read_token_list(c.female_words));
  ReferenceLexicon refs(names, std::move(male), std::move(female));
  return Lexica{std::move(names), std::move(refs)};
}

GeoTables load_geo(const RunConfig& c) {
  if (c.states.empty() && c.cities.empty()) return {};
  if (c.states.empty() || c.cities.empty()) {
    throw Error("--states and --cities must be given together");
  }
  return read_geo(c.states, c.cities, c.aliases);
}

struct Profiles {
  std::vector<UserProfile> records;
  AttributeMap attrs;
};

Profiles load_profiles(const RunConfig& c, const Lexica& lex, const GeoTables& geo, std::ostream& out) {
  Profiles p;
  if (c.profiles.empty()) return p;
  auto r = read_profiles(c.profiles);
  warn_rejected(out, c.profiles, r);
  p.records = std::move(r.records);
  auto keywords = ProfileKeywords::defaults();
  if (!c.mother_words.empty()) keywords.mother = to_set(read_token_list(c.mother_words));
  if (!c.father_words.empty()) keywords.father = to_set(read_token_list(c.father_words));
  if (!c.student_words.empty()) keywords.student = to_set(read_token_list(c.student_words));
  p.attrs = derive_attributes(p.records, lex.names, geo, keywords);
  return p;
}

std::vector<std::string> list_scripts(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".fountain" || ext == ".txt" || ext == ".script")) {
          found.push_back(e.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  return files;
}

// Per-movie results of the screenplay path.
struct ScriptRun {
  std::vector<std::string> movie_ids;
  std::vector<std::string> titles;
  std::vector<DialogueSet> sets;
  std::vector<int> classic;
  std::vector<MetricReport> reports;
};

ScriptRun run_scripts(const RunConfig& c, const Lexica& lex) {
  const auto files = list_scripts(c.scripts);
  std::map<std::string, CastGenders> cast;
  if (!c.cast.empty()) cast = read_cast(c.cast);

  ScriptRun run;
  const std::size_t n = files.size();
  run.movie_ids.resize(n);
  run.titles.resize(n);
  run.sets.resize(n);
  run.classic.resize(n);
  run.reports.resize(n);
  parallel_for(n, c.threads, [&](std::size_t i) {
    const std::string id = fs::path(files[i]).stem().string();
    ScriptDocument doc;
    try {
      doc = parse_script(csv::read_file(files[i]));
    } catch (const ParseError& e) {
      throw ParseError(files[i] + ": " + e.what());
    }
    CastGenders genders;
    if (auto it = cast.find(id); it != cast.end()) genders = it->second;
    if (c.infer_cast) {
      for (const auto& scene : doc.scenes) {
        for (const auto& line : scene.lines) {
          if (!genders.count(line.character_cue)) {
            genders.emplace(line.character_cue, infer_gender(line.character_cue, lex.names));
          }
        }
      }
    }
    run.movie_ids[i] = id;
    run.titles[i] = doc.title;
    run.sets[i] = build_script_dialogues(doc, genders, lex.refs, {id});
    run.classic[i] = classic_bechdel(run.sets[i], genders, {c.speaking_only});
    run.reports[i] = compute_report(run.sets[i], c.min_aligned, id, !c.exclude_unknown_pairs);
  });
  // Sort by movie id so the output does not depend on argument order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return run.movie_ids[a] < run.movie_ids[b]; });
  for (std::size_t i = 1; i < n; ++i) {
    if (run.movie_ids[order[i]] == run.movie_ids[order[i - 1]]) {
      throw IngestError(IngestError::Kind::kInvalid, "duplicate movie id " + run.movie_ids[order[i]]);
    }
  }
  ScriptRun sorted;
  for (auto i : order) {
    sorted.movie_ids.push_back(std::move(run.movie_ids[i]));
    sorted.titles.push_back(std::move(run.titles[i]));
    sorted.sets.push_back(std::move(run.sets[i]));
    sorted.classic.push_back(run.classic[i]);
    sorted.reports.push_back(std::move(run.reports[i]));
  }
  return sorted;
}

std::vector<Dialogue> all_dialogues(const ScriptRun& run) {
  std::vector<Dialogue> out;
  for (const auto& s : run.sets) out.insert(out.end(), s.dialogues().begin(), s.dialogues().end());
  return out;
}

std::vector<std::string> movie_csv_header() {
  auto h = report_csv_header();
  h.push_back("b");
  return h;
}

void write_script_outputs(const ScriptRun& run, const fs::path& dir, std::ostream& out) {
  write_dialogues((dir / "script_dialogues.jsonl").string(), all_dialogues(run));
  std::vector<std::vector<std::string>> rows{movie_csv_header()};
  ordered_json movies = ordered_json::array();
  std::vector<std::vector<std::string>> table{{"movie", "dialogues", "B_F", "B_M", "b"}};
  for (std::size_t i = 0; i < run.movie_ids.size(); ++i) {
    auto row = report_csv_row(run.reports[i]);
    row.push_back(std::to_string(run.classic[i]));
    rows.push_back(std::move(row));
    ordered_json m;
    m["movie_id"] = run.movie_ids[i];
    m["title"] = run.titles[i];
    m["b"] = run.classic[i];
    m["report"] = to_json(run.reports[i]);
    movies.push_back(std::move(m));
    table.push_back({run.movie_ids[i], std::to_string(run.reports[i].total),
                     format_ratio(run.reports[i].bechdel_female),
                     format_ratio(run.reports[i].bechdel_male), std::to_string(run.classic[i])});
  }
  write_file(dir / "movies.csv", csv_text(rows));
  write_file(dir / "movies.json", dump(movies));
  print_table(out, table);
}

SegmentOptions segment_options(const RunConfig& c) {
  SegmentOptions o;
  o.fit.t_min = c.t_min;
  o.fit.min_gaps = c.min_gaps;
  o.min_mentions = c.min_mentions;
  o.mention_rule = c.mention_rule == "both" ? MentionRule::kBothDirections : MentionRule::kBidirectionalSum;
  o.tau_override = c.tau_seconds;
  o.per_pair = c.per_pair;
  o.threads = c.threads;
  return o;
}

ordered_json segment_json(const SegmentResult& r) {
  ordered_json j;
  j["tau"] = json_number(r.tau);
  j["tau_source"] = r.pooled_fit ? "fit" : "override";
  j["pairs"] = r.pairs.size();
  j["pairs_fitted_individually"] = r.pairs_fitted_individually;
  j["dialogues"] = r.dialogues.size();
  j["fit"] = r.pooled_fit ? to_json(*r.pooled_fit) : ordered_json(nullptr);
  return j;
}

SegmentResult run_segment(const RunConfig& c, const Lexica& lex, const Profiles& profiles,
                          std::ostream& out) {
  auto msgs = read_messages(c.messages);
  warn_rejected(out, c.messages, msgs);
  GenderMap genders;
  for (const auto& [id, a] : profiles.attrs) genders.emplace(id, a.gender);
  return segment_corpus(msgs.records, genders, lex.refs, segment_options(c));
}

void write_segment_outputs(const SegmentResult& r, const fs::path& dir, std::ostream& out) {
  write_dialogues((dir / "stream_dialogues.jsonl").string(), r.dialogues);
  write_file(dir / "fit.json", dump(segment_json(r)));
  std::vector<std::vector<std::string>> table{{"pairs", "dialogues", "tau_s", "alpha", "beta", "ks"}};
  const auto& f = r.pooled_fit;
  table.push_back({std::to_string(r.pairs.size()), std::to_string(r.dialogues.size()),
                   format_number(r.tau), f ? format_number(f->alpha) : "NA",
                   f ? format_number(f->beta) : "NA", f ? format_number(f->ks_distance) : "NA"});
  print_table(out, table);
}

DialogueSet load_dialogue_files(const std::vector<std::string>& paths, std::ostream& out,
                                std::string label) {
  std::vector<Dialogue> all;
  for (const auto& p : paths) {
    auto r = read_dialogues(p);
    if (r.malformed > 0) out << "warning: " << p << ": skipped " << r.malformed << " malformed line(s)\n";
    all.insert(all.end(), std::make_move_iterator(r.dialogues.begin()),
               std::make_move_iterator(r.dialogues.end()));
  }
  return DialogueSet(std::move(all), std::move(label));
}

// Score bundle for one dialogue corpus.
struct ScoreRun {
  MetricReport corpus;
  std::vector<CohortComparison> cohorts;
  std::vector<MetricReport> states;
  std::vector<CorrelationRow> correlates;
};

ScoreRun run_score(const RunConfig& c, const DialogueSet& ds, const Profiles& profiles,
                   const GeoTables& geo) {
  ScoreRun run;
  run.corpus = compute_report(ds, c.min_aligned, "corpus", !c.exclude_unknown_pairs);
  if (!profiles.attrs.empty()) {
    auto names = standard_cohort_names();
    for (const auto& extra : c.cohorts) {
      if (std::find(names.begin(), names.end(), extra) == names.end()) names.push_back(extra);
    }
    for (const auto& name : names) {
      run.cohorts.push_back(cohort_independence(ds, profiles.attrs, cohort_by_name(name), c.min_aligned));
    }
    run.states = state_independence_map(ds, profiles.attrs, c.min_aligned);
    if (!geo.states.empty()) run.correlates = state_correlates(run.states, geo);
  }
  return run;
}

ordered_json score_json(const ScoreRun& run) {
  ordered_json j;
  j["corpus"] = to_json(run.corpus);
  j["cohorts"] = ordered_json::array();
  for (const auto& c : run.cohorts) j["cohorts"].push_back(to_json(c));
  j["states"] = ordered_json::array();
  for (const auto& s : run.states) j["states"].push_back(to_json(s));
  j["correlates"] = ordered_json::array();
  for (const auto& r : run.correlates) j["correlates"].push_back(to_json(r));
  return j;
}

void write_score_outputs(const ScoreRun& run, const fs::path& dir, const GeoTables& geo,
                         std::ostream& out) {
  auto header = report_csv_header();
  header.insert(header.begin(), "scope");
  std::vector<std::vector<std::string>> rows{header};
  auto add = [&](const std::string& scope, const MetricReport& r) {
    auto row = report_csv_row(r);
    row.insert(row.begin(), scope);
    rows.push_back(std::move(row));
  };
  add("corpus", run.corpus);
  for (const auto& c : run.cohorts) {
    add("cohort", c.cohort);
    add("complement", c.complement);
  }
  for (const auto& s : run.states) add("state", s);
  write_file(dir / "scores.csv", csv_text(rows));
  write_file(dir / "score.json", dump(score_json(run)));

  if (!run.correlates.empty()) {
    std::vector<std::vector<std::string>> crow{{"variable", "against", "control", "method", "n", "r", "p_value"}};
    for (const auto& r : run.correlates) {
      crow.push_back({r.variable, r.against, r.control, std::string(to_string(r.method)), std::to_string(r.n),
                      r.result ? format_number(r.result->effect) : "NA",
                      r.result ? format_number(r.result->p_value) : "NA"});
    }
    write_file(dir / "state_correlates.csv", csv_text(crow));

    SvgSeries income{"states", {}, "#d62728", true, false};
    SvgSeries latitude{"states", {}, "#1f77b4", true, false};
    for (const auto& s : run.states) {
      const auto* st = geo.find_state(s.label);
      if (!st) continue;
      if (s.independence_female.defined) income.points.emplace_back(st->avg_income, s.independence_female.value());
      if (s.independence_male.defined) {
        latitude.points.emplace_back(static_cast<double>(st->largest_city_latitude) / 3600.0,
                                     s.independence_male.value());
      }
    }
    write_file(dir / "states_income.svg",
               render_scatter_svg({income}, "Female independence by state income", "average income", "I_F"));
    write_file(dir / "states_latitude.svg",
               render_scatter_svg({latitude}, "Male independence by latitude", "latitude of largest city (deg)",
                                  "I_M"));
  }

  std::vector<std::vector<std::string>> table{{"scope", "label", "dialogues", "B_F", "B_M", "I_F", "I_M", "asym"}};
  auto line = [&](const std::string& scope, const MetricReport& r) {
    table.push_back({scope, r.label, std::to_string(r.total), format_ratio(r.bechdel_female),
                     format_ratio(r.bechdel_male), format_ratio(r.independence_female),
                     format_ratio(r.independence_male), r.asymmetry ? format_number(*r.asymmetry) : "NA"});
  };
  line("corpus", run.corpus);
  for (const auto& c : run.cohorts) {
    line("cohort", c.cohort);
    line("complement", c.complement);
  }
  for (const auto& s : run.states) line("state", s);
  print_table(out, table);
}

struct CompareRun {
  std::vector<ScoreGroup> groups;
  std::vector<std::optional<BootstrapSummary>> bootstraps;
  std::vector<ScoreDistance> distances;
};

// Movie groups split by b from the movie table (falling back to the classic
// test computed from the script), plus one bootstrap group per social corpus.
CompareRun run_compare(const RunConfig& c, const std::vector<MetricReport>& movie_reports,
                       const std::map<std::string, int>& movie_b,
                       const std::vector<std::pair<std::string, DialogueSet>>& social) {
  CompareRun run;
  std::vector<const MetricReport*> pass, fail;
  for (const auto& r : movie_reports) {
    auto it = movie_b.find(r.label);
    if (it == movie_b.end()) continue;
    (it->second == 3 ? pass : fail).push_back(&r);
  }
  run.groups.push_back(group_from_reports("movies_b3", pass));
  run.bootstraps.emplace_back();
  run.groups.push_back(group_from_reports("movies_b_lt3", fail));
  run.bootstraps.emplace_back();
  for (const auto& [label, ds] : social) {
    auto summary = bootstrap_score_centroids(ds, c.sample_size, c.n_samples, c.seed);
    run.groups.push_back(group_from_bootstrap(label, summary));
    run.bootstraps.push_back(std::move(summary));
  }
  for (std::size_t i = 0; i < run.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < run.groups.size(); ++j) {
      if (run.groups[i].points.empty() || run.groups[j].points.empty()) continue;
      run.distances.push_back(score_distance(run.groups[i], run.groups[j]));
    }
  }
  return run;
}

ordered_json compare_json(const CompareRun& run) {
  ordered_json j;
  j["groups"] = ordered_json::array();
  for (std::size_t i = 0; i < run.groups.size(); ++i) {
    const auto& g = run.groups[i];
    ordered_json e;
    e["label"] = g.label;
    e["points"] = g.points.size();
    double mf = 0, mm = 0;
    for (const auto& [x, y] : g.points) {
      mf += x;
      mm += y;
    }
    const double n = static_cast<double>(g.points.size());
    e["mean_B_F"] = g.points.empty() ? ordered_json(nullptr) : json_number(mf / n);
    e["mean_B_M"] = g.points.empty() ? ordered_json(nullptr) : json_number(mm / n);
    if (run.bootstraps[i]) {
      const auto& b = *run.bootstraps[i];
      e["bootstrap"] = {{"sample_size", b.sample_size},
                        {"n_samples", b.n_samples},
                        {"seed", b.seed},
                        {"sd_B_F", json_number(b.sd.first)},
                        {"sd_B_M", json_number(b.sd.second)}};
    }
    j["groups"].push_back(std::move(e));
  }
  j["distances"] = ordered_json::array();
  for (const auto& d : run.distances) j["distances"].push_back(to_json(d));
  return j;
}

void write_compare_outputs(const CompareRun& run, const fs::path& dir, std::ostream& out) {
  write_file(dir / "compare.json", dump(compare_json(run)));
  std::vector<std::vector<std::string>> rows{
      {"a", "b", "shift_B_F", "p_B_F", "shift_B_M", "p_B_M", "euclidean"}};
  for (const auto& d : run.distances) {
    rows.push_back({d.a, d.b, format_number(d.female.effect), format_number(d.female.p_value),
                    format_number(d.male.effect), format_number(d.male.p_value), format_number(d.euclidean)});
  }
  write_file(dir / "distances.csv", csv_text(rows));
  static const char* kColors[] = {"#2ca02c", "#d62728", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"};
  std::vector<SvgSeries> series;
  for (std::size_t i = 0; i < run.groups.size(); ++i) {
    series.push_back({run.groups[i].label, run.groups[i].points, kColors[i % 6], false, true});
  }
  write_file(dir / "centroids.svg", render_scatter_svg(series, "Bechdel scores", "B_F", "B_M"));
  print_table(out, rows);
}

std::map<std::string, int> movie_b_table(const std::vector<MovieRecord>& movies, const ScriptRun* scripts) {
  std::map<std::string, int> b;
  if (scripts) {
    for (std::size_t i = 0; i < scripts->movie_ids.size(); ++i) b[scripts->movie_ids[i]] = scripts->classic[i];
  }
  for (const auto& m : movies) {
    if (m.bechdel_b) b[m.movie_id] = *m.bechdel_b;
  }
  return b;
}

std::vector<MovieRecord> load_movies(const RunConfig& c, std::ostream& out) {
  if (c.movies.empty()) return {};
  auto r = read_movies(c.movies);
  warn_rejected(out, c.movies, r);
  return std::move(r.records);
}

std::string stem_label(const std::string& path) { return fs::path(path).stem().string(); }

fs::path prepare_out(const RunConfig& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

void validate(const RunConfig& c) {
  for (const auto* p : {&c.messages, &c.profiles, &c.names, &c.male_words, &c.female_words,
                        &c.mother_words, &c.father_words, &c.student_words, &c.cast,
                        &c.movies, &c.shares, &c.states, &c.cities, &c.aliases, &c.script_dialogues}) {
    require_path(*p);
  }
  for (const auto* list : {&c.stoplists, &c.scripts, &c.dialogues}) {
    for (const auto& p : *list) require_path(p);
  }
  if (c.min_mentions <= 0 || c.min_aligned == 0 || c.min_ego_dialogues == 0 || c.sample_size == 0 ||
      c.n_samples == 0 || c.min_gaps == 0 || c.threads == 0) {
    throw Error("thresholds must be positive");
  }
  if (c.n_samples < 100) throw Error("n-samples must be at least 100");
  if (!(c.ratio > 1.0)) throw Error("ratio must be greater than 1");
  if (!(c.t_min > 0.0)) throw Error("t-min must be positive");
  if (c.tau_seconds && !(*c.tau_seconds > c.t_min)) throw Error("tau-seconds must exceed t-min");
  if (c.mention_rule != "sum" && c.mention_rule != "both") throw Error("mention-rule must be sum or both");
}

void cmd_parse_scripts(const RunConfig& c, std::ostream& out) {
  if (c.scripts.empty()) throw IngestError(IngestError::Kind::kMissing, "parse-scripts needs --scripts");
  const auto lex = load_lexica(c, out);
  const auto run = run_scripts(c, lex);
  write_script_outputs(run, prepare_out(c), out);
}

void cmd_segment(const RunConfig& c, std::ostream& out) {
  if (c.messages.empty()) throw IngestError(IngestError::Kind::kMissing, "segment needs --messages");
  const auto lex = load_lexica(c, out);
  const auto geo = load_geo(c);
  const auto profiles = load_profiles(c, lex, geo, out);
  const auto result = run_segment(c, lex, profiles, out);
  write_segment_outputs(result, prepare_out(c), out);
}

void cmd_score(const RunConfig& c, std::ostream& out) {
  if (c.dialogues.empty()) throw IngestError(IngestError::Kind::kMissing, "score needs --dialogues");
  const auto lex = load_lexica(c, out);
  const auto geo = load_geo(c);
  const auto profiles = load_profiles(c, lex, geo, out);
  const auto ds = load_dialogue_files(c.dialogues, out, "corpus");
  write_score_outputs(run_score(c, ds, profiles, geo), prepare_out(c), geo, out);
}

void cmd_compare(const RunConfig& c, std::ostream& out) {
  if (c.script_dialogues.empty()) {
    throw IngestError(IngestError::Kind::kMissing, "compare needs --script-dialogues");
  }
  const auto movies = load_movies(c, out);
  const auto scripts = load_dialogue_files({c.script_dialogues}, out, "movies");
  std::map<std::string, std::vector<Dialogue>> by_movie;
  for (const auto& d : scripts.dialogues()) by_movie[d.unit].push_back(d);
  std::vector<MetricReport> reports;
  for (auto& [id, ds] : by_movie) {
    reports.push_back(compute_report(DialogueSet(std::move(ds)), c.min_aligned, id, !c.exclude_unknown_pairs));
  }
  std::vector<std::pair<std::string, DialogueSet>> social;
  for (const auto& p : c.dialogues) {
    social.emplace_back(stem_label(p), load_dialogue_files({p}, out, stem_label(p)));
  }
  write_compare_outputs(run_compare(c, reports, movie_b_table(movies, nullptr), social), prepare_out(c), out);
}

void cmd_report(const RunConfig& c, std::ostream& out) {
  const auto dir = prepare_out(c);
  const auto lex = load_lexica(c, out);
  const auto geo = load_geo(c);
  const auto profiles = load_profiles(c, lex, geo, out);
  const auto movies = load_movies(c, out);
  ordered_json bundle;
  bundle["config"] = {{"min_mentions", c.min_mentions},   {"min_aligned", c.min_aligned},
                      {"min_ego_dialogues", c.min_ego_dialogues}, {"sample_size", c.sample_size},
                      {"n_samples", c.n_samples},         {"ratio", json_number(c.ratio)},
                      {"t_min", json_number(c.t_min)},   {"seed", c.seed}};
  bundle["lexicon"] = {{"names", lex.names.size()},
                       {"assigned_male", lex.names.assigned_count(Gender::kMale)},
                       {"assigned_female", lex.names.assigned_count(Gender::kFemale)}};

  std::optional<ScriptRun> scripts;
  if (!c.scripts.empty()) {
    out << "== scripts\n";
    scripts = run_scripts(c, lex);
    write_script_outputs(*scripts, dir, out);
    ordered_json m = ordered_json::array();
    for (std::size_t i = 0; i < scripts->movie_ids.size(); ++i) {
      m.push_back({{"movie_id", scripts->movie_ids[i]},
                   {"b", scripts->classic[i]},
                   {"report", to_json(scripts->reports[i])}});
    }
    bundle["movies"] = std::move(m);
  }

  std::vector<std::pair<std::string, DialogueSet>> social;
  if (!c.messages.empty()) {
    out << "== segment\n";
    auto seg = run_segment(c, lex, profiles, out);
    write_segment_outputs(seg, dir, out);
    bundle["segment"] = segment_json(seg);
    social.emplace_back("stream", DialogueSet(std::move(seg.dialogues), "stream"));
  }
  for (const auto& p : c.dialogues) {
    social.emplace_back(stem_label(p), load_dialogue_files({p}, out, stem_label(p)));
  }

  if (!social.empty()) {
    out << "== score\n";
    std::vector<Dialogue> all;
    for (const auto& [label, ds] : social) all.insert(all.end(), ds.dialogues().begin(), ds.dialogues().end());
    const auto score = run_score(c, DialogueSet(std::move(all), "corpus"), profiles, geo);
    write_score_outputs(score, dir, geo, out);
    bundle["score"] = score_json(score);
  }

  const auto b_table = movie_b_table(movies, scripts ? &*scripts : nullptr);
  if (scripts && !social.empty()) {
    out << "== compare\n";
    const auto cmp = run_compare(c, scripts->reports, b_table, social);
    write_compare_outputs(cmp, dir, out);
    bundle["compare"] = compare_json(cmp);
  }

  if (!c.shares.empty() && !profiles.attrs.empty()) {
    out << "== shares\n";
    auto shares = read_shares(c.shares);
    warn_rejected(out, c.shares, shares);
    const auto dangling = dangling_shares(shares.records, profiles.records, movies);
    if (!dangling.empty()) out << "warning: " << dangling.size() << " share(s) reference unknown users or movies\n";
    auto scores = movie_scores(movies, scripts ? scripts->reports : std::vector<MetricReport>{});
    for (const auto& [id, b] : b_table) {
      if (!scores[id].b) scores[id].b = b;
    }
    const auto by_gender = compare_shares_by_sharer_gender(shares.records, scores, profiles.attrs);
    bundle["shares"] = to_json(by_gender);
    std::vector<std::vector<std::string>> rows{{"test", "effect", "p_value"}};
    for (const auto& t : by_gender.tests) {
      rows.push_back({t.name, t.result ? format_number(t.result->effect) : "NA",
                      t.result ? format_number(t.result->p_value) : t.reason});
    }
    if (!social.empty()) {
      std::vector<Dialogue> all;
      for (const auto& [label, ds] : social) all.insert(all.end(), ds.dialogues().begin(), ds.dialogues().end());
      const auto imb = sharer_imbalance_by_pass(shares.records, scores, DialogueSet(std::move(all)),
                                                profiles.attrs, c.min_ego_dialogues);
      bundle["imbalance_by_pass"] = to_json(imb);
      for (const auto& t : imb.tests) {
        rows.push_back({t.name, t.result ? format_number(t.result->effect) : "NA",
                        t.result ? format_number(t.result->p_value) : t.reason});
      }
    }
    write_file(dir / "shares.csv", csv_text(rows));
    print_table(out, rows);
  }

  if (!movies.empty()) {
    ordered_json pop = ordered_json::array();
    for (const auto& t : compare_popularity_by_pass(movies)) pop.push_back(to_json(t));
    bundle["popularity"] = std::move(pop);
  }
  write_file(dir / "report.json", dump(bundle));
  out << "wrote " << (dir / "report.json").string() << "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Gender asymmetry metrics for dialogue corpora", "bechdel"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--messages", c.messages, "message stream (JSON lines)");
  app.add_option("--profiles", c.profiles, "user profiles CSV");
  app.add_option("--names", c.names, "name frequency CSV (name,gender,count)");
  app.add_option("--stoplist", c.stoplists, "tokens excluded from the name lexicon (repeatable)");
  app.add_option("--male-words", c.male_words, "male reference words, one per line");
  app.add_option("--female-words", c.female_words, "female reference words, one per line");
  app.add_option("--mother-words", c.mother_words, "profile keywords for mothers");
  app.add_option("--father-words", c.father_words, "profile keywords for fathers");
  app.add_option("--student-words", c.student_words, "profile keywords for students");
  app.add_option("--scripts", c.scripts, "screenplay files or directories");
  app.add_option("--cast", c.cast, "cast CSV (movie_id,character_cue,gender)");
  app.add_option("--movies", c.movies, "movies CSV");
  app.add_option("--shares", c.shares, "shares CSV (user_id,movie_id)");
  app.add_option("--states", c.states, "state attributes CSV");
  app.add_option("--cities", c.cities, "largest cities CSV (city,state)");
  app.add_option("--aliases", c.aliases, "city alias CSV (alias,city,state)");
  app.add_option("--dialogues", c.dialogues, "dialogue files (JSON lines)");
  app.add_option("--script-dialogues", c.script_dialogues, "movie dialogue file for compare");
  app.add_option("--cohort", c.cohorts, "extra cohort, e.g. state:MI");

  app.add_option("--min-mentions", c.min_mentions, "mentions for a pair to count as interacting")
      ->capture_default_str();
  app.add_option("--min-aligned", c.min_aligned, "same-gender dialogues needed for I_F/I_M")
      ->capture_default_str();
  app.add_option("--min-ego-dialogues", c.min_ego_dialogues, "dialogues needed for a user's imbalance")
      ->capture_default_str();
  app.add_option("--sample-size", c.sample_size, "dialogues per bootstrap subset")->capture_default_str();
  app.add_option("--n-samples", c.n_samples, "bootstrap subsets")->capture_default_str();
  app.add_option("--ratio", c.ratio, "name assignment frequency ratio")->capture_default_str();
  app.add_option("--t-min", c.t_min, "smallest gap used in the fit (seconds)")->capture_default_str();
  app.add_option("--min-gaps", c.min_gaps, "gaps needed to fit")->capture_default_str();
  app.add_option("--tau-seconds", c.tau_seconds, "fixed cutoff; skips fitting");
  app.add_flag("--per-pair", c.per_pair, "fit a cutoff per pair where possible");
  app.add_option("--mention-rule", c.mention_rule, "sum or both")->capture_default_str();
  app.add_flag("--exclude-unknown-pairs", c.exclude_unknown_pairs,
               "leave U-U dialogues out of the Bechdel score denominator");
  app.add_flag("--infer-cast", c.infer_cast, "infer missing cast genders from cue names");
  app.add_flag("--speaking-only", c.speaking_only, "classic test counts only women who speak");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->capture_default_str();
  app.add_option("--out", c.out_dir, "output directory")->capture_default_str();

  auto* parse_scripts = app.add_subcommand("parse-scripts", "screenplays to dialogues, scores and classic test");
  auto* segment = app.add_subcommand("segment", "fit the gap model and split pair streams");
  auto* score = app.add_subcommand("score", "metrics for a dialogue corpus, its cohorts and states");
  auto* compare = app.add_subcommand("compare", "score distances between movies and social corpora");
  auto* report = app.add_subcommand("report", "run every step the inputs allow");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    validate(c);
    if (parse_scripts->parsed()) cmd_parse_scripts(c, out);
    if (segment->parsed()) cmd_segment(c, out);
    if (score->parsed()) cmd_score(c, out);
    if (compare->parsed()) cmd_compare(c, out);
    if (report->parsed()) cmd_report(c, out);
  } catch (const IngestError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == IngestError::Kind::kMissing ? kExitMissingInput : kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace bechdel
