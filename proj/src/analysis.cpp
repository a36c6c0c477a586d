#include "bechdel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "bechdel/text.hpp"

namespace bechdel {

using nlohmann::ordered_json;

AttributeMap derive_attributes(const std::vector<UserProfile>& profiles, const GenderLexicon& names,
                               const GeoTables& geo, const ProfileKeywords& keywords) {
  const Locator locator(geo);
  AttributeMap out;
  for (const auto& p : profiles) {
    UserAttributes a;
    a.user_id = p.user_id;
    a.gender = infer_gender(p.full_name, names);
    a.flags = profile_flags(p.bio, keywords);
    a.location = locator.locate(p.location_raw);
    out.emplace(p.user_id, std::move(a));
  }
  return out;
}

CohortSpec cohort_by_name(std::string_view name) {
  const std::string n = text::to_lower(text::trim(name));
  using A = UserAttributes;
  if (n == "everyone") return {n, [](const A&) { return true; }};
  if (n == "parents") return {n, [](const A& a) { return a.flags.mother || a.flags.father; }};
  if (n == "mothers") return {n, [](const A& a) { return a.flags.mother; }};
  if (n == "fathers") return {n, [](const A& a) { return a.flags.father; }};
  if (n == "students") return {n, [](const A& a) { return a.flags.student; }};
  if (n == "urban") return {n, [](const A& a) { return a.location.urbanity == Urbanity::kUrban; }};
  if (n == "rural") return {n, [](const A& a) { return a.location.urbanity == Urbanity::kRural; }};
  if (n == "female") return {n, [](const A& a) { return a.gender == Gender::kFemale; }};
  if (n == "male") return {n, [](const A& a) { return a.gender == Gender::kMale; }};
  if (n.rfind("state:", 0) == 0 && n.size() > 6) {
    std::string code = text::to_upper(n.substr(6));
    return {"state:" + code, [code](const A& a) { return a.location.state == code; }};
  }
  throw Error("unknown cohort '" + std::string(name) + "'");
}

std::vector<std::string> standard_cohort_names() {
  return {"parents", "mothers", "fathers", "students", "urban", "rural"};
}

namespace {

std::optional<StatResult> independence_test(const RatioMetric& a, const RatioMetric& b) {
  if (!a.defined || !b.defined) return std::nullopt;
  return proportion_test(a.numerator, a.denominator, b.numerator, b.denominator);
}

const UserAttributes* find_user(const AttributeMap& attrs, const std::string& id) {
  auto it = attrs.find(id);
  return it == attrs.end() ? nullptr : &it->second;
}

NamedTest rank_sum_test(std::string name, const std::vector<double>& a, const std::vector<double>& b) {
  NamedTest t{std::move(name), std::nullopt, ""};
  if (a.empty() || b.empty()) {
    t.reason = "empty group";
    return t;
  }
  t.result = wilcoxon_ranksum(a, b);
  return t;
}

double median_or_nan(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : median(v);
}

}  // namespace

CohortComparison cohort_independence(const DialogueSet& ds, const AttributeMap& attrs,
                                     const CohortSpec& cohort, std::uint64_t min_aligned) {
  std::vector<Dialogue> inside;
  std::vector<Dialogue> outside;
  CohortComparison out;
  for (const auto& d : ds.dialogues()) {
    const auto* a = find_user(attrs, d.participants.first);
    const auto* b = find_user(attrs, d.participants.second);
    if (!a || !b) {
      ++out.unresolved;
      continue;
    }
    const bool in_a = cohort.predicate(*a);
    const bool in_b = cohort.predicate(*b);
    if (in_a && in_b) {
      inside.push_back(d);
    } else if (!in_a && !in_b) {
      outside.push_back(d);
    } else {
      ++out.mixed;
    }
  }
  out.cohort = compute_report(DialogueSet(std::move(inside)), min_aligned, cohort.label);
  out.complement = compute_report(DialogueSet(std::move(outside)), min_aligned, "not " + cohort.label);
  out.female_test = independence_test(out.cohort.independence_female, out.complement.independence_female);
  out.male_test = independence_test(out.cohort.independence_male, out.complement.independence_male);
  return out;
}

std::vector<MetricReport> state_independence_map(const DialogueSet& ds, const AttributeMap& attrs,
                                                 std::uint64_t min_aligned) {
  std::map<std::string, std::vector<Dialogue>> by_state;
  for (const auto& d : ds.dialogues()) {
    const auto* a = find_user(attrs, d.participants.first);
    const auto* b = find_user(attrs, d.participants.second);
    if (!a || !b || a->location.state.empty() || a->location.state != b->location.state) continue;
    by_state[a->location.state].push_back(d);
  }
  std::vector<MetricReport> out;
  out.reserve(by_state.size());
  for (auto& [state, dialogues] : by_state) {
    out.push_back(compute_report(DialogueSet(std::move(dialogues)), min_aligned, state));
  }
  return out;
}

std::vector<CorrelationRow> state_correlates(const std::vector<MetricReport>& states,
                                             const GeoTables& geo) {
  // Column order: I_F, I_M, income, gini, latitude, longitude.
  const std::vector<std::string> names = {"I_F", "I_M", "income", "gini", "latitude", "longitude"};
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& r : states) {
    if (!r.independence_female.defined || !r.independence_male.defined) continue;
    const auto* s = geo.find_state(r.label);
    if (!s) continue;
    cols[0].push_back(r.independence_female.value());
    cols[1].push_back(r.independence_male.value());
    cols[2].push_back(s->avg_income);
    cols[3].push_back(s->gini);
    cols[4].push_back(static_cast<double>(s->largest_city_latitude) / 3600.0);
    cols[5].push_back(static_cast<double>(s->largest_city_longitude) / 3600.0);
  }
  const std::size_t n = cols[0].size();
  std::vector<CorrelationRow> out;
  auto run = [&](CorrelationRow row, auto&& fn) {
    row.n = n;
    try {
      row.result = fn();
    } catch (const StatsError& e) {
      row.reason = e.what();
    }
    out.push_back(std::move(row));
  };
  for (std::size_t target = 0; target < 2; ++target) {
    for (std::size_t against = 0; against < names.size(); ++against) {
      if (against == target || (target == 1 && against == 0)) continue;
      const auto& x = cols[target];
      const auto& y = cols[against];
      run({names[target], names[against], "", Method::kPearson, 0, std::nullopt, ""},
          [&] { return pearson(x, y); });
      run({names[target], names[against], "", Method::kSpearman, 0, std::nullopt, ""},
          [&] { return spearman(x, y); });
      for (std::size_t control = 0; control < names.size(); ++control) {
        if (control == target || control == against) continue;
        run({names[target], names[against], names[control], Method::kPartialPearson, 0,
             std::nullopt, ""},
            [&] { return partial_pearson(x, y, {cols[control]}); });
      }
    }
  }
  return out;
}

MovieScores movie_scores(const std::vector<MovieRecord>& movies,
                         const std::vector<MetricReport>& script_reports) {
  MovieScores out;
  for (const auto& m : movies) out[m.movie_id].b = m.bechdel_b;
  for (const auto& r : script_reports) {
    auto& s = out[r.label];
    if (r.bechdel_female.defined) s.bechdel_female = r.bechdel_female.value();
    if (r.bechdel_male.defined) s.bechdel_male = r.bechdel_male.value();
  }
  return out;
}

ShareComparison compare_shares_by_sharer_gender(const std::vector<ShareRecord>& shares,
                                                const MovieScores& scores,
                                                const AttributeMap& attrs) {
  // Index 0 female sharers, 1 male sharers.
  std::array<std::vector<double>, 2> bf, bm, b;
  std::array<std::uint64_t, 2> pass{0, 0};
  ShareComparison out;
  for (const auto& s : shares) {
    const auto* u = find_user(attrs, s.user_id);
    if (!u || u->gender == Gender::kUnknown) continue;
    auto it = scores.find(s.movie_id);
    if (it == scores.end()) continue;
    const int g = u->gender == Gender::kFemale ? 0 : 1;
    (g == 0 ? out.female_shares : out.male_shares)++;
    const auto& sc = it->second;
    if (sc.bechdel_female) bf[g].push_back(*sc.bechdel_female);
    if (sc.bechdel_male) bm[g].push_back(*sc.bechdel_male);
    if (sc.b) {
      b[g].push_back(*sc.b);
      if (*sc.b == 3) ++pass[g];
    }
  }
  out.tests.push_back(rank_sum_test("B_F", bf[0], bf[1]));
  out.tests.push_back(rank_sum_test("B_M", bm[0], bm[1]));
  out.tests.push_back(rank_sum_test("b", b[0], b[1]));
  NamedTest rate{"pass_rate", std::nullopt, ""};
  if (b[0].empty() || b[1].empty()) {
    rate.reason = "empty group";
  } else {
    rate.result = proportion_test(pass[0], b[0].size(), pass[1], b[1].size());
  }
  out.tests.push_back(std::move(rate));
  return out;
}

std::vector<NamedTest> compare_popularity_by_pass(const std::vector<MovieRecord>& movies) {
  std::array<std::vector<double>, 2> views, likes, dislikes;  // 0 pass, 1 fail
  for (const auto& m : movies) {
    if (!m.bechdel_b) continue;
    const int k = *m.bechdel_b == 3 ? 0 : 1;
    if (m.views) views[k].push_back(static_cast<double>(*m.views));
    if (m.likes) likes[k].push_back(static_cast<double>(*m.likes));
    if (m.dislikes) dislikes[k].push_back(static_cast<double>(*m.dislikes));
  }
  return {rank_sum_test("views", views[0], views[1]), rank_sum_test("likes", likes[0], likes[1]),
          rank_sum_test("dislikes", dislikes[0], dislikes[1])};
}

std::map<std::string, double> ego_imbalance(const DialogueSet& ds, std::size_t min_dialogues) {
  struct Tally {
    Gender gender = Gender::kUnknown;
    std::size_t total = 0;
    std::size_t with_man = 0;
  };
  std::map<std::string, Tally> tallies;
  auto add = [&](const std::string& id, Gender self, Gender other) {
    if (self == Gender::kUnknown) return;
    auto& t = tallies[id];
    t.gender = self;
    ++t.total;
    if (other == Gender::kMale) ++t.with_man;
  };
  for (const auto& d : ds.dialogues()) {
    add(d.participants.first, d.g1, d.g2);
    if (d.participants.second != d.participants.first) add(d.participants.second, d.g2, d.g1);
  }
  std::map<std::string, double> out;
  for (const auto& [id, t] : tallies) {
    if (t.total < min_dialogues || t.total == 0) continue;
    out.emplace(id, static_cast<double>(t.with_man) / static_cast<double>(t.total));
  }
  return out;
}

ImbalanceByPass sharer_imbalance_by_pass(const std::vector<ShareRecord>& shares,
                                         const MovieScores& scores, const DialogueSet& ds,
                                         const AttributeMap& attrs, std::size_t min_dialogues) {
  const auto ego = ego_imbalance(ds, min_dialogues);
  ImbalanceByPass out;
  std::array<std::vector<double>, 4> female_by_b, male_by_b;
  for (const auto& s : shares) {
    const auto* u = find_user(attrs, s.user_id);
    if (!u || u->gender == Gender::kUnknown) continue;
    auto e = ego.find(s.user_id);
    auto m = scores.find(s.movie_id);
    if (e == ego.end() || m == scores.end() || !m->second.b) continue;
    const int b = *m->second.b;
    const bool female = u->gender == Gender::kFemale;
    auto& cell = female ? (b == 3 ? out.female_pass : out.female_fail)
                        : (b == 3 ? out.male_pass : out.male_fail);
    cell.push_back(e->second);
    if (b >= 0 && b <= 3) (female ? female_by_b : male_by_b)[b].push_back(e->second);
  }
  for (int b = 0; b < 4; ++b) {
    out.female_median_by_b[b] = median_or_nan(female_by_b[b]);
    out.male_median_by_b[b] = median_or_nan(male_by_b[b]);
  }
  out.tests.push_back(rank_sum_test("female_vs_male_pass", out.female_pass, out.male_pass));
  out.tests.push_back(rank_sum_test("female_vs_male_fail", out.female_fail, out.male_fail));
  out.tests.push_back(rank_sum_test("female_pass_vs_fail", out.female_pass, out.female_fail));
  out.tests.push_back(rank_sum_test("male_pass_vs_fail", out.male_pass, out.male_fail));
  return out;
}

ScoreDistance score_distance(const ScoreGroup& a, const ScoreGroup& b) {
  if (a.points.empty() || b.points.empty()) throw StatsError("score distance needs two non-empty groups");
  auto split = [](const ScoreGroup& g, std::vector<double>& f, std::vector<double>& m) {
    for (const auto& [x, y] : g.points) {
      f.push_back(x);
      m.push_back(y);
    }
  };
  std::vector<double> af, am, bf, bm;
  split(a, af, am);
  split(b, bf, bm);
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  ScoreDistance d;
  d.a = a.label;
  d.b = b.label;
  d.female = wilcoxon_ranksum(af, bf);
  d.male = wilcoxon_ranksum(am, bm);
  d.euclidean = std::hypot(mean(af) - mean(bf), mean(am) - mean(bm));
  return d;
}

ScoreGroup group_from_reports(std::string label, const std::vector<const MetricReport*>& reports) {
  ScoreGroup g{std::move(label), {}};
  for (const auto* r : reports) {
    if (r->bechdel_female.defined && r->bechdel_male.defined) {
      g.points.emplace_back(r->bechdel_female.value(), r->bechdel_male.value());
    }
  }
  return g;
}

ScoreGroup group_from_bootstrap(std::string label, const BootstrapSummary& summary) {
  return ScoreGroup{std::move(label), summary.samples};
}

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s.erase(0, s[0] == '-' ? 1 : 0);
  return s;
}

std::string tick(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  std::string s = buf;
  return s == "-0" ? "0" : s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Moments {
  double mx = 0, my = 0, sx = 0, sy = 0, sxy = 0;
};

Moments moments(const std::vector<std::pair<double, double>>& pts) {
  Moments m;
  const double n = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    m.mx += x;
    m.my += y;
  }
  m.mx /= n;
  m.my /= n;
  for (const auto& [x, y] : pts) {
    m.sx += (x - m.mx) * (x - m.mx);
    m.sy += (y - m.my) * (y - m.my);
    m.sxy += (x - m.mx) * (y - m.my);
  }
  return m;
}

}  // namespace

std::string render_scatter_svg(const std::vector<SvgSeries>& series, std::string_view title,
                               std::string_view x_label, std::string_view y_label) {
  constexpr double kWidth = 640, kHeight = 480, kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto extend = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) extend(x, y);
    if (s.ellipse && s.points.size() > 1) {
      const auto m = moments(s.points);
      const double n = static_cast<double>(s.points.size());
      const double sdx = std::sqrt(m.sx / (n - 1)), sdy = std::sqrt(m.sy / (n - 1));
      extend(m.mx - sdx, m.my - sdy);
      extend(m.mx + sdx, m.my + sdy);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  auto pad = [](double& lo, double& hi) {
    if (hi - lo <= 0) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double p = 0.05 * (hi - lo);
    lo -= p;
    hi += p;
  };
  pad(x0, x1);
  pad(y0, y1);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
         fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) +
         "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    out += "<line x1=\"" + fixed(px(xv)) + "\" y1=\"" + fixed(kTop + ph) + "\" x2=\"" + fixed(px(xv)) +
           "\" y2=\"" + fixed(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
    out += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(py(yv)) + "\" x2=\"" + fixed(kLeft) +
           "\" y2=\"" + fixed(py(yv)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
  }
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 15) +
         "\" text-anchor=\"middle\">" + xml_escape(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + fixed(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fixed(kTop + ph / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = xml_escape(s.color);
    out += "<g fill=\"" + color + "\" fill-opacity=\"0.7\">\n";
    for (const auto& [x, y] : s.points) {
      out += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) + "\" r=\"3\"/>\n";
    }
    out += "</g>\n";
    if (s.points.size() > 1) {
      const auto m = moments(s.points);
      if (s.trend && m.sx > 0) {
        const double slope = m.sxy / m.sx;
        double lo = s.points.front().first, hi = lo;
        for (const auto& p : s.points) {
          lo = std::min(lo, p.first);
          hi = std::max(hi, p.first);
        }
        out += "<line x1=\"" + fixed(px(lo)) + "\" y1=\"" + fixed(py(m.my + slope * (lo - m.mx))) +
               "\" x2=\"" + fixed(px(hi)) + "\" y2=\"" + fixed(py(m.my + slope * (hi - m.mx))) +
               "\" stroke=\"" + color + "\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
      }
      if (s.ellipse) {
        const double n = static_cast<double>(s.points.size());
        const double sdx = std::sqrt(m.sx / (n - 1)), sdy = std::sqrt(m.sy / (n - 1));
        out += "<ellipse cx=\"" + fixed(px(m.mx)) + "\" cy=\"" + fixed(py(m.my)) + "\" rx=\"" +
               fixed(sdx / (x1 - x0) * pw) + "\" ry=\"" + fixed(sdy / (y1 - y0) * ph) +
               "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
      }
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    out += "<rect x=\"" + fixed(kWidth - kRight + 15) + "\" y=\"" + fixed(ly - 8) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + fixed(kWidth - kRight + 30) + "\" y=\"" + fixed(ly + 1) + "\">" +
           xml_escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

ordered_json to_json(const NamedTest& t) {
  ordered_json j;
  j["name"] = t.name;
  if (t.result) {
    j["result"] = to_json(*t.result);
  } else {
    j["result"] = nullptr;
    j["reason"] = t.reason;
  }
  return j;
}

ordered_json to_json(const CohortComparison& c) {
  ordered_json j;
  j["cohort"] = to_json(c.cohort);
  j["complement"] = to_json(c.complement);
  j["mixed"] = c.mixed;
  j["unresolved"] = c.unresolved;
  j["female_test"] = c.female_test ? to_json(*c.female_test) : ordered_json(nullptr);
  j["male_test"] = c.male_test ? to_json(*c.male_test) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const CorrelationRow& r) {
  ordered_json j;
  j["variable"] = r.variable;
  j["against"] = r.against;
  j["control"] = r.control.empty() ? ordered_json(nullptr) : ordered_json(r.control);
  j["method"] = std::string(to_string(r.method));
  j["n"] = r.n;
  if (r.result) {
    j["r"] = json_number(r.result->effect);
    j["p_value"] = json_number(r.result->p_value);
  } else {
    j["r"] = nullptr;
    j["reason"] = r.reason;
  }
  return j;
}

ordered_json to_json(const ShareComparison& s) {
  ordered_json j;
  j["female_shares"] = s.female_shares;
  j["male_shares"] = s.male_shares;
  j["tests"] = ordered_json::array();
  for (const auto& t : s.tests) j["tests"].push_back(to_json(t));
  return j;
}

ordered_json to_json(const ImbalanceByPass& s) {
  ordered_json j;
  auto cell = [](const std::vector<double>& v) {
    ordered_json c;
    c["n"] = v.size();
    c["median"] = json_number(median_or_nan(v));
    return c;
  };
  j["female_pass"] = cell(s.female_pass);
  j["female_fail"] = cell(s.female_fail);
  j["male_pass"] = cell(s.male_pass);
  j["male_fail"] = cell(s.male_fail);
  j["female_median_by_b"] = ordered_json::array();
  j["male_median_by_b"] = ordered_json::array();
  for (int b = 0; b < 4; ++b) {
    j["female_median_by_b"].push_back(json_number(s.female_median_by_b[b]));
    j["male_median_by_b"].push_back(json_number(s.male_median_by_b[b]));
  }
  j["tests"] = ordered_json::array();
  for (const auto& t : s.tests) j["tests"].push_back(to_json(t));
  return j;
}

ordered_json to_json(const ScoreDistance& d) {
  ordered_json j;
  j["a"] = d.a;
  j["b"] = d.b;
  j["shift_B_F"] = json_number(d.female.effect);
  j["p_B_F"] = json_number(d.female.p_value);
  j["shift_B_M"] = json_number(d.male.effect);
  j["p_B_M"] = json_number(d.male.p_value);
  j["euclidean"] = json_number(d.euclidean);
  return j;
}

}  // namespace bechdel
