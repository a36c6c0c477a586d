#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bechdel/analysis.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace bechdel;

namespace {

const Gender F = Gender::kFemale, M = Gender::kMale;

Dialogue between(const std::string& a, Gender ga, const std::string& b, Gender gb, bool m, bool f) {
  Dialogue d;
  d.g1 = ga;
  d.g2 = gb;
  d.m = m;
  d.f = f;
  d.participants = {a, b};
  return d;
}

UserAttributes user(std::string id, Gender g, bool mother, std::string state) {
  UserAttributes a;
  a.user_id = std::move(id);
  a.gender = g;
  a.flags.mother = mother;
  a.location.state = std::move(state);
  return a;
}

AttributeMap attrs() {
  AttributeMap m;
  for (auto u : {user("m1", F, true, "MI"), user("m2", F, true, "MI"), user("w1", F, false, "MI"),
                 user("w2", F, false, "NY"), user("d1", M, false, "NY"), user("d2", M, false, "NY")}) {
    m[u.user_id] = u;
  }
  return m;
}

}  // namespace

TEST_CASE("derived attributes") {
  const std::vector<UserProfile> profiles = {{"u1", "Mary Smith", "mom of 3", "Detroit, MI"},
                                             {"u2", "John Doe", "grad student", "somewhere"}};
  GeoTables geo;
  geo.top_cities = {{"Detroit", "MI"}};
  const auto a = derive_attributes(profiles, build_lexicon(gen::name_records()), geo);
  REQUIRE(a.size() == 2);
  CHECK(a.at("u1").gender == F);
  CHECK(a.at("u1").flags.mother);
  CHECK(a.at("u1").location == Location{"MI", Urbanity::kUrban});
  CHECK(a.at("u2").gender == M);
  CHECK(a.at("u2").flags.student);
  CHECK(a.at("u2").location.state.empty());
}

TEST_CASE("named cohorts") {
  const auto a = attrs();
  CHECK(cohort_by_name("Mothers").predicate(a.at("m1")));
  CHECK_FALSE(cohort_by_name("mothers").predicate(a.at("w1")));
  CHECK(cohort_by_name("state:ny").predicate(a.at("d1")));
  CHECK(cohort_by_name("male").predicate(a.at("d2")));
  CHECK_THROWS_AS(cohort_by_name("pirates"), Error);
  CHECK(standard_cohort_names().size() == 6);
}

TEST_CASE("cohort split counts both endpoints") {
  const DialogueSet ds({between("m1", F, "m2", F, false, false), between("m1", F, "m2", F, true, false),
                        between("m1", F, "w1", F, false, false), between("w1", F, "w2", F, true, false),
                        between("d1", M, "d2", M, false, false), between("d1", M, "x9", M, false, false)});
  const auto c = cohort_independence(ds, attrs(), cohort_by_name("mothers"), 1);
  CHECK(c.cohort.total == 2);
  CHECK(c.cohort.independence_female.numerator == 1);
  CHECK(c.complement.total == 2);
  CHECK(c.complement.label == "not mothers");
  CHECK(c.mixed == 1);
  CHECK(c.unresolved == 1);
  CHECK(c.female_test);
  CHECK_FALSE(c.male_test);  // no male dialogues among mothers
}

TEST_CASE("state map keeps same-state dialogues") {
  const DialogueSet ds({between("m1", F, "w1", F, false, false), between("m2", F, "w2", F, false, false),
                        between("d1", M, "d2", M, false, true), between("w2", F, "d1", M, false, false)});
  const auto states = state_independence_map(ds, attrs(), 1);
  REQUIRE(states.size() == 2);
  CHECK(states[0].label == "MI");
  CHECK(states[0].total == 1);
  CHECK(states[1].label == "NY");
  CHECK(states[1].total == 2);
  CHECK(states[1].independence_male.numerator == 0);
}

TEST_CASE("state correlates match direct statistics") {
  Rng rng(8);
  GeoTables geo;
  std::vector<MetricReport> reports;
  std::vector<double> i_f, income;
  for (int s = 0; s < 12; ++s) {
    const std::string code = std::string(1, static_cast<char>('A' + s)) + "X";
    geo.states.push_back({code, 40000.0 + 1000 * s + 700 * rng.uniform(), 0.4 + 0.01 * rng.uniform(),
                          100000 + s * 1000, 300000 - s * 500});
    std::vector<Dialogue> ds;
    for (int k = 0; k < 60; ++k) {
      ds.push_back(between("a", F, "b", F, rng.bernoulli(0.3 + 0.02 * s), false));
      ds.push_back(between("c", M, "d", M, false, rng.bernoulli(0.2)));
    }
    reports.push_back(compute_report(DialogueSet(ds), 50, code));
    i_f.push_back(reports.back().independence_female.value());
    income.push_back(geo.states.back().avg_income);
  }
  const auto rows = state_correlates(reports, geo);
  bool found = false;
  for (const auto& r : rows) {
    if (r.variable == "I_F" && r.against == "income" && r.control.empty() &&
        r.method == Method::kPearson) {
      REQUIRE(r.result);
      CHECK(r.n == 12);
      CHECK(r.result->effect == doctest::Approx(pearson(i_f, income).effect));
      found = true;
    }
    if (r.control.empty()) continue;
    CHECK(r.method == Method::kPartialPearson);
  }
  CHECK(found);
}

TEST_CASE("ego imbalance") {
  std::vector<Dialogue> ds;
  for (int i = 0; i < 3; ++i) ds.push_back(between("ann", F, "bob", M, false, false));
  ds.push_back(between("ann", F, "cat", F, false, false));
  ds.push_back(between("bob", M, "dan", M, false, false));
  ds.push_back(between("zed", Gender::kUnknown, "bob", M, false, false));
  const auto ego = ego_imbalance(DialogueSet(ds), 2);
  CHECK(ego.at("ann") == doctest::Approx(0.75));
  CHECK(ego.at("bob") == doctest::Approx(0.2));
  CHECK_FALSE(ego.count("cat"));
  CHECK_FALSE(ego.count("zed"));
}

TEST_CASE("share comparison and popularity") {
  const std::vector<MovieRecord> movies = {
      {"p1", "", 3, false, 100, 10, 1}, {"p2", "", 3, false, 120, 12, 2},
      {"f1", "", 1, false, 50, 5, 3},   {"f2", "", 0, false, 40, 4, 4}};
  MetricReport script;
  script.label = "p1";
  script.bechdel_female = RatioMetric::of(2, 10);
  script.bechdel_male = RatioMetric::of(3, 10);
  const auto scores = movie_scores(movies, {script});
  CHECK(scores.at("p1").bechdel_female == doctest::Approx(0.2));
  CHECK_FALSE(scores.at("f1").bechdel_female);
  CHECK(scores.at("f2").b == 0);

  AttributeMap a = attrs();
  const std::vector<ShareRecord> shares = {{"m1", "p1"}, {"m2", "p2"}, {"w1", "p1"}, {"w2", "f1"},
                                           {"d1", "f1"}, {"d2", "f2"}, {"d1", "p2"}, {"nobody", "p1"}};
  const auto cmp = compare_shares_by_sharer_gender(shares, scores, a);
  CHECK(cmp.female_shares == 4);
  CHECK(cmp.male_shares == 3);
  REQUIRE(cmp.tests.size() == 4);
  CHECK(cmp.tests[3].name == "pass_rate");

  const auto pop = compare_popularity_by_pass(movies);
  REQUIRE(pop.size() == 3);
  REQUIRE(pop[0].result);
  CHECK(pop[0].result->effect > 0);
}

TEST_CASE("score distance") {
  const ScoreGroup a{"a", {{0.1, 0.3}, {0.2, 0.4}, {0.3, 0.5}}};
  const ScoreGroup b{"b", {{0.4, 0.3}, {0.5, 0.4}}};
  const auto d = score_distance(a, b);
  CHECK(d.euclidean == doctest::Approx(std::hypot(0.2 - 0.45, 0.4 - 0.35)));
  CHECK(d.female.effect == doctest::Approx(-0.25));
  CHECK(d.female.method == Method::kRankSumExact);
}

TEST_CASE("svg output is deterministic") {
  SvgSeries s{"points", {{0.1, 0.2}, {0.3, 0.5}, {0.6, 0.4}}, "#ff0000", true, true};
  const auto a = render_scatter_svg({s}, "title <x>", "B_F", "B_M");
  CHECK(a == render_scatter_svg({s}, "title <x>", "B_F", "B_M"));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("title &lt;x&gt;") != std::string::npos);
  CHECK(a.find("points") != std::string::npos);
}
