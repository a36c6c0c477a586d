#include "bechdel/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bechdel/csv.hpp"
#include "bechdel/stats.hpp"
#include "bechdel/text.hpp"

namespace bechdel {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Origin o) { return o == Origin::kMovie ? "movie" : "stream"; }

Dialogue make_dialogue(Gender g1, Gender g2, std::pair<std::string, std::string> participants,
                       std::vector<std::string> source_ids, Origin origin, std::string unit,
                       const std::vector<std::string_view>& texts, const ReferenceLexicon& lex) {
  Dialogue d;
  d.g1 = g1;
  d.g2 = g2;
  d.participants = std::move(participants);
  d.source_ids = std::move(source_ids);
  d.origin = origin;
  d.unit = std::move(unit);
  for (auto t : texts) {
    const auto refs = detect_references(t, lex);
    d.m = d.m || refs.male;
    d.f = d.f || refs.female;
    if (d.m && d.f) break;
  }
  return d;
}

Dialogue swap_genders(Dialogue d) {
  d.g1 = swap_gender(d.g1);
  d.g2 = swap_gender(d.g2);
  std::swap(d.m, d.f);
  return d;
}

Pattern Pattern::parse(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    auto end = s.find(',', pos);
    parts.emplace_back(text::trim(s.substr(pos, end == std::string_view::npos ? s.npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (parts.size() != 4) throw Error("pattern needs four symbols: '" + std::string(s) + "'");
  Pattern p;
  auto gender = [](const std::string& t) -> std::optional<Gender> {
    if (t == "*") return std::nullopt;
    return gender_from_string(t);
  };
  auto flag = [&](const std::string& t) -> std::optional<bool> {
    if (t == "*") return std::nullopt;
    if (t == "0") return false;
    if (t == "1") return true;
    throw Error("reference flag must be 0, 1 or *: '" + std::string(s) + "'");
  };
  p.g1 = gender(parts[0]);
  p.g2 = gender(parts[1]);
  p.m = flag(parts[2]);
  p.f = flag(parts[3]);
  return p;
}

bool Pattern::matches(Gender a, Gender b, bool mm, bool ff) const {
  if (m && *m != mm) return false;
  if (f && *f != ff) return false;
  auto ordered = [&](Gender x, Gender y) { return (!g1 || *g1 == x) && (!g2 || *g2 == y); };
  return ordered(a, b) || (unordered && ordered(b, a));
}

DialogueSet::DialogueSet(std::vector<Dialogue> dialogues, std::string label)
    : dialogues_(std::move(dialogues)), label_(std::move(label)) {
  counts_.fill(0);
  for (const auto& d : dialogues_) ++counts_[cell(d.g1, d.g2, d.m, d.f)];
}

std::size_t DialogueSet::cell(Gender g1, Gender g2, bool m, bool f) {
  return ((static_cast<std::size_t>(g1) * 3 + static_cast<std::size_t>(g2)) * 2 + (m ? 1 : 0)) * 2 +
         (f ? 1 : 0);
}

void DialogueSet::decode_cell(std::size_t c, Gender& g1, Gender& g2, bool& m, bool& f) {
  f = (c & 1) != 0;
  c >>= 1;
  m = (c & 1) != 0;
  c >>= 1;
  g2 = static_cast<Gender>(c % 3);
  g1 = static_cast<Gender>(c / 3);
}

std::uint64_t select_count(const DialogueSet& ds, const Pattern& p) {
  std::uint64_t n = 0;
  const auto& counts = ds.counts();
  for (std::size_t c = 0; c < DialogueSet::kCells; ++c) {
    if (!counts[c]) continue;
    Gender a, b;
    bool m, f;
    DialogueSet::decode_cell(c, a, b, m, f);
    if (p.matches(a, b, m, f)) n += counts[c];
  }
  return n;
}

double RatioMetric::value() const {
  if (!defined) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

RatioMetric RatioMetric::of(std::uint64_t num, std::uint64_t den, double level) {
  if (den == 0) return undefined(num, den, "empty denominator");
  RatioMetric r;
  r.numerator = num;
  r.denominator = den;
  r.defined = true;
  const auto ci = wilson_ci(num, den, level);
  r.ci_low = ci.first;
  r.ci_high = ci.second;
  return r;
}

RatioMetric RatioMetric::undefined(std::uint64_t num, std::uint64_t den, std::string reason) {
  RatioMetric r;
  r.numerator = num;
  r.denominator = den;
  r.defined = false;
  r.reason = std::move(reason);
  return r;
}

namespace {
constexpr auto F = Gender::kFemale;
constexpr auto M = Gender::kMale;
constexpr auto U = Gender::kUnknown;

Pattern pat(std::optional<Gender> g1, std::optional<Gender> g2, std::optional<bool> m,
            std::optional<bool> f, bool unordered = true) {
  return Pattern{g1, g2, m, f, unordered};
}
}  // namespace

ScorePair bechdel_scores(const DialogueSet& ds, bool include_unknown_pairs) {
  std::uint64_t total = ds.size();
  if (!include_unknown_pairs) total -= select_count(ds, pat(U, U, {}, {}));
  const auto ff = select_count(ds, pat(F, F, false, {}));
  const auto mm = select_count(ds, pat(M, M, {}, false));
  return ScorePair{RatioMetric::of(ff, total), RatioMetric::of(mm, total)};
}

ScorePair dialogue_imbalance(const DialogueSet& ds) {
  const auto cross = select_count(ds, pat(F, M, {}, {}));
  const auto female_any = select_count(ds, pat(F, {}, {}, {}));
  const auto mm = select_count(ds, pat(M, M, {}, {}));
  const auto male_any = select_count(ds, pat(M, {}, {}, {}));
  ScorePair out{RatioMetric::of(cross, female_any), RatioMetric::of(mm, male_any)};
  if (!out.female.defined) out.female.reason = "no dialogues involving females";
  if (!out.male.defined) out.male.reason = "no dialogues involving males";
  return out;
}

IndependenceResult gender_independence(const DialogueSet& ds, std::uint64_t min_aligned) {
  auto one = [&](Gender g) {
    const auto aligned = select_count(ds, pat(g, g, {}, {}));
    const auto free = g == F ? select_count(ds, pat(F, F, false, {}))
                             : select_count(ds, pat(M, M, {}, false));
    if (aligned == 0 || aligned < min_aligned) {
      return RatioMetric::undefined(free, aligned,
                                    "fewer than " + std::to_string(min_aligned) +
                                        " gender-aligned dialogues");
    }
    return RatioMetric::of(free, aligned);
  };
  IndependenceResult r{one(F), one(M), std::nullopt};
  if (r.female.defined && r.male.defined) r.asymmetry = r.male.value() - r.female.value();
  return r;
}

MetricReport compute_report(const DialogueSet& ds, std::uint64_t min_aligned, std::string label,
                            bool include_unknown_pairs) {
  MetricReport r;
  r.label = label.empty() ? ds.label() : std::move(label);
  r.total = ds.size();
  r.counts = ds.counts();
  r.min_aligned = min_aligned;
  const auto b = bechdel_scores(ds, include_unknown_pairs);
  r.bechdel_female = b.female;
  r.bechdel_male = b.male;
  const auto x = dialogue_imbalance(ds);
  r.imbalance_female = x.female;
  r.imbalance_male = x.male;
  const auto i = gender_independence(ds, min_aligned);
  r.independence_female = i.female;
  r.independence_male = i.male;
  r.asymmetry = i.asymmetry;
  return r;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_ratio(const RatioMetric& r) { return format_number(r.value()); }

ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  double rounded = std::strtod(buf, nullptr);
  if (rounded == 0.0) rounded = 0.0;
  return rounded;
}

ordered_json to_json(const RatioMetric& r) {
  ordered_json j;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  if (r.defined) {
    j["value"] = json_number(r.value());
    j["ci95"] = {json_number(r.ci_low), json_number(r.ci_high)};
  } else {
    j["value"] = nullptr;
    j["undefined_reason"] = r.reason;
  }
  return j;
}

ordered_json to_json(const MetricReport& r) {
  ordered_json j;
  j["label"] = r.label;
  j["dialogues"] = r.total;
  j["min_aligned"] = r.min_aligned;
  j["B_F"] = to_json(r.bechdel_female);
  j["B_M"] = to_json(r.bechdel_male);
  j["X_F"] = to_json(r.imbalance_female);
  j["X_M"] = to_json(r.imbalance_male);
  j["I_F"] = to_json(r.independence_female);
  j["I_M"] = to_json(r.independence_male);
  j["asymmetry"] = r.asymmetry ? json_number(*r.asymmetry) : ordered_json(nullptr);
  ordered_json counts = ordered_json::object();
  for (std::size_t c = 0; c < DialogueSet::kCells; ++c) {
    if (!r.counts[c]) continue;
    Gender a, b;
    bool m, f;
    DialogueSet::decode_cell(c, a, b, m, f);
    std::string key{to_char(a), ',', to_char(b), ',', m ? '1' : '0', ',', f ? '1' : '0'};
    counts[key] = r.counts[c];
  }
  j["counts"] = std::move(counts);
  return j;
}

std::vector<std::string> report_csv_header() {
  return {"label", "dialogues", "B_F",  "B_M",  "X_F",  "X_M",       "I_F",       "I_F_lo",
          "I_F_hi", "I_M",      "I_M_lo", "I_M_hi", "asymmetry", "n_FF", "n_MM"};
}

std::vector<std::string> report_csv_row(const MetricReport& r) {
  auto lo = [](const RatioMetric& m) { return m.defined ? format_number(m.ci_low) : "NA"; };
  auto hi = [](const RatioMetric& m) { return m.defined ? format_number(m.ci_high) : "NA"; };
  return {r.label,
          std::to_string(r.total),
          format_ratio(r.bechdel_female),
          format_ratio(r.bechdel_male),
          format_ratio(r.imbalance_female),
          format_ratio(r.imbalance_male),
          format_ratio(r.independence_female),
          lo(r.independence_female),
          hi(r.independence_female),
          format_ratio(r.independence_male),
          lo(r.independence_male),
          hi(r.independence_male),
          r.asymmetry ? format_number(*r.asymmetry) : "NA",
          std::to_string(r.independence_female.denominator),
          std::to_string(r.independence_male.denominator)};
}

ordered_json to_json(const Dialogue& d) {
  ordered_json j;
  j["unit"] = d.unit;
  j["origin"] = std::string(to_string(d.origin));
  j["g1"] = std::string(1, to_char(d.g1));
  j["g2"] = std::string(1, to_char(d.g2));
  j["m"] = d.m ? 1 : 0;
  j["f"] = d.f ? 1 : 0;
  j["participants"] = {d.participants.first, d.participants.second};
  j["source_ids"] = d.source_ids;
  return j;
}

std::string dialogue_to_json_line(const Dialogue& d) { return to_json(d).dump(); }

namespace {
std::optional<Dialogue> dialogue_from_json(const json& j) {
  try {
    Dialogue d;
    d.unit = j.value("unit", "");
    const std::string origin = j.value("origin", "stream");
    if (origin == "movie") {
      d.origin = Origin::kMovie;
    } else if (origin == "stream") {
      d.origin = Origin::kStream;
    } else {
      return std::nullopt;
    }
    d.g1 = gender_from_string(j.at("g1").get<std::string>());
    d.g2 = gender_from_string(j.at("g2").get<std::string>());
    auto flag = [&](const char* key) {
      const auto& v = j.at(key);
      if (v.is_boolean()) return v.get<bool>();
      const int i = v.get<int>();
      if (i != 0 && i != 1) throw Error("flag out of range");
      return i == 1;
    };
    d.m = flag("m");
    d.f = flag("f");
    if (auto it = j.find("participants"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) return std::nullopt;
      d.participants = {(*it)[0].get<std::string>(), (*it)[1].get<std::string>()};
    }
    if (auto it = j.find("source_ids"); it != j.end()) {
      d.source_ids = it->get<std::vector<std::string>>();
    }
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}
}  // namespace

DialogueReadResult parse_dialogues(std::string_view input) {
  DialogueReadResult out;
  std::size_t pos = 0;
  while (pos < input.size()) {
    std::size_t end = input.find('\n', pos);
    if (end == std::string_view::npos) end = input.size();
    const auto line = input.substr(pos, end - pos);
    pos = end + 1;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line.begin(), line.end(), nullptr, false);
    std::optional<Dialogue> d;
    if (!j.is_discarded() && j.is_object()) d = dialogue_from_json(j);
    if (d) {
      out.dialogues.push_back(std::move(*d));
    } else {
      ++out.malformed;
    }
  }
  return out;
}

DialogueReadResult read_dialogues(const std::string& path) {
  return parse_dialogues(csv::read_file(path));
}

void write_dialogues(const std::string& path, const std::vector<Dialogue>& dialogues) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& d : dialogues) out << dialogue_to_json_line(d) << '\n';
}

}  // namespace bechdel
