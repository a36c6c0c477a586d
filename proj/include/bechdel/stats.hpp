#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bechdel/metrics.hpp"

namespace bechdel {

enum class Method {
  kRankSumExact,
  kRankSumNormal,
  kChiSquared,
  kPearson,
  kSpearman,
  kPartialPearson,
};
std::string_view to_string(Method m);

struct StatResult {
  double statistic = 0.0;
  double p_value = 1.0;
  // Location shift, proportion difference, or correlation depending on method.
  double effect = 0.0;
  Method method = Method::kPearson;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

nlohmann::ordered_json to_json(const StatResult& r);

// Special functions.
double normal_cdf(double x);
double normal_quantile(double p);
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
double regularized_beta(double a, double b, double x);
double chi_squared_sf(double x, double df);
// Two-sided p-value of a Student t statistic.
double student_t_two_sided(double t, double df);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> v);

double median(std::vector<double> v);
// Median of all pairwise differences a_i - b_j.
double hodges_lehmann(std::span<const double> a, std::span<const double> b);

enum class RankSumMode { kAuto, kExact, kNormal };
inline constexpr std::size_t kExactRankSumLimit = 12;

// Two-sided Wilcoxon rank-sum (Mann-Whitney) test. statistic is U for `a`;
// effect is the Hodges-Lehmann shift of a relative to b. kAuto uses the exact
// permutation distribution (conditional on ties) when |a| + |b| <= 12 and the
// tie-corrected normal approximation with continuity correction otherwise.
StatResult wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                            RankSumMode mode = RankSumMode::kAuto);

// 2x2 chi-squared test of k1/n1 against k2/n2 with Yates continuity correction.
StatResult proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

StatResult pearson(std::span<const double> x, std::span<const double> y);
StatResult spearman(std::span<const double> x, std::span<const double> y);
// Correlation of the least-squares residuals of x and y after projecting both
// onto an intercept plus `controls`.
StatResult partial_pearson(std::span<const double> x, std::span<const double> y,
                           const std::vector<std::vector<double>>& controls);

// Wilson score interval for k successes out of n.
std::pair<double, double> wilson_ci(std::uint64_t k, std::uint64_t n, double level = 0.95);

struct BootstrapSummary {
  std::pair<double, double> centroid;  // (mean B_F, mean B_M)
  std::pair<double, double> sd;
  std::size_t n_samples = 0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> samples;  // (B_F, B_M) per subset
};

// Repeatedly shuffles the dialogues and cuts them into disjoint subsets of
// `sample_size` (the remainder of each pass is dropped) until n_samples
// subsets have been scored.
BootstrapSummary bootstrap_score_centroids(const DialogueSet& ds, std::size_t sample_size = 225,
                                           std::size_t n_samples = 1000, std::uint64_t seed = 1);

}  // namespace bechdel
