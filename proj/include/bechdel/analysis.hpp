#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bechdel/gender.hpp"
#include "bechdel/ingest.hpp"
#include "bechdel/metrics.hpp"
#include "bechdel/stats.hpp"

namespace bechdel {

struct UserAttributes {
  std::string user_id;
  Gender gender = Gender::kUnknown;
  ProfileFlags flags;
  Location location;
};

using AttributeMap = std::map<std::string, UserAttributes>;

AttributeMap derive_attributes(const std::vector<UserProfile>& profiles, const GenderLexicon& names,
                               const GeoTables& geo,
                               const ProfileKeywords& keywords = ProfileKeywords::defaults());

struct CohortSpec {
  std::string label;
  std::function<bool(const UserAttributes&)> predicate;
};

// Named cohorts: everyone, parents, mothers, fathers, students, urban, rural,
// female, male, state:XX. Throws Error for anything else.
CohortSpec cohort_by_name(std::string_view name);
std::vector<std::string> standard_cohort_names();

struct CohortComparison {
  MetricReport cohort;
  MetricReport complement;
  // Dialogues with one endpoint in the cohort and one outside.
  std::uint64_t mixed = 0;
  // Dialogues with an endpoint that has no profile.
  std::uint64_t unresolved = 0;
  // Cohort vs complement independence; absent unless both sides are defined.
  std::optional<StatResult> female_test;
  std::optional<StatResult> male_test;
};

// A dialogue belongs to the cohort when both endpoints satisfy the predicate
// and to the complement when neither does.
CohortComparison cohort_independence(const DialogueSet& ds, const AttributeMap& attrs,
                                     const CohortSpec& cohort, std::uint64_t min_aligned = 50);

// One report per state code, in code order, over dialogues whose two
// endpoints are located in the same state.
std::vector<MetricReport> state_independence_map(const DialogueSet& ds, const AttributeMap& attrs,
                                                 std::uint64_t min_aligned = 50);

struct CorrelationRow {
  std::string variable;  // I_F or I_M
  std::string against;
  std::string control;   // empty for plain correlations
  Method method = Method::kPearson;
  std::size_t n = 0;
  std::optional<StatResult> result;
  std::string reason;    // set when result is absent
};

// Correlations of I_F and I_M with income, gini, latitude, longitude and the
// other independence value across states where both are defined: Pearson,
// Spearman, and partial Pearson with each remaining variable as the control.
std::vector<CorrelationRow> state_correlates(const std::vector<MetricReport>& states,
                                             const GeoTables& geo);

struct MovieScore {
  std::optional<double> bechdel_female;
  std::optional<double> bechdel_male;
  std::optional<int> b;
};

using MovieScores = std::map<std::string, MovieScore>;

// b from the movie table, B_F/B_M from per-movie script reports (by label).
MovieScores movie_scores(const std::vector<MovieRecord>& movies,
                         const std::vector<MetricReport>& script_reports);

struct NamedTest {
  std::string name;
  std::optional<StatResult> result;
  std::string reason;
};

struct ShareComparison {
  std::size_t female_shares = 0;
  std::size_t male_shares = 0;
  std::vector<NamedTest> tests;  // B_F, B_M, b rank-sums and pass-rate chi-squared
};

// Per-share comparison between shares by female and by male users.
ShareComparison compare_shares_by_sharer_gender(const std::vector<ShareRecord>& shares,
                                                const MovieScores& scores,
                                                const AttributeMap& attrs);

// Rank-sum of views, likes and dislikes between passing (b = 3) and failing movies.
std::vector<NamedTest> compare_popularity_by_pass(const std::vector<MovieRecord>& movies);

// Per user, over the dialogues they take part in: the share with a man for a
// woman (her X_F), the share with another man for a man (his X_M). Genders
// come from the dialogues. Users with fewer than min_dialogues are absent.
std::map<std::string, double> ego_imbalance(const DialogueSet& ds, std::size_t min_dialogues = 25);

struct ImbalanceByPass {
  // Per-share ego imbalance by sharer gender and pass status (b = 3).
  std::vector<double> female_pass, female_fail, male_pass, male_fail;
  // Median per b value 0..3 for female and male sharers (NaN when empty).
  std::array<double, 4> female_median_by_b{};
  std::array<double, 4> male_median_by_b{};
  std::vector<NamedTest> tests;
};

ImbalanceByPass sharer_imbalance_by_pass(const std::vector<ShareRecord>& shares,
                                         const MovieScores& scores, const DialogueSet& ds,
                                         const AttributeMap& attrs,
                                         std::size_t min_dialogues = 25);

// (B_F, B_M) points of one group: per-movie scores or bootstrap subsets.
struct ScoreGroup {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct ScoreDistance {
  std::string a;
  std::string b;
  // Hodges-Lehmann shift a - b on each axis, with rank-sum p-values.
  StatResult female;
  StatResult male;
  // Distance between the two group means.
  double euclidean = 0.0;
};

ScoreDistance score_distance(const ScoreGroup& a, const ScoreGroup& b);

ScoreGroup group_from_reports(std::string label, const std::vector<const MetricReport*>& reports);
ScoreGroup group_from_bootstrap(std::string label, const BootstrapSummary& summary);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool trend = false;    // least-squares line over the series
  bool ellipse = false;  // mean +- one sd on each axis
};

// Self-contained scatter plot; numbers are printed with fixed precision so the
// output is byte-stable.
std::string render_scatter_svg(const std::vector<SvgSeries>& series, std::string_view title,
                               std::string_view x_label, std::string_view y_label);

nlohmann::ordered_json to_json(const CohortComparison& c);
nlohmann::ordered_json to_json(const CorrelationRow& r);
nlohmann::ordered_json to_json(const NamedTest& t);
nlohmann::ordered_json to_json(const ShareComparison& s);
nlohmann::ordered_json to_json(const ImbalanceByPass& s);
nlohmann::ordered_json to_json(const ScoreDistance& d);

}  // namespace bechdel
