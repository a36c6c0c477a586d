#include "bechdel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "bechdel/rng.hpp"

namespace bechdel {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kRankSumExact:
      return "ranksum_exact";
    case Method::kRankSumNormal:
      return "ranksum_normal";
    case Method::kChiSquared:
      return "chi_squared";
    case Method::kPearson:
      return "pearson";
    case Method::kSpearman:
      return "spearman";
    case Method::kPartialPearson:
      return "partial_pearson";
  }
  return "unknown";
}

nlohmann::ordered_json to_json(const StatResult& r) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["statistic"] = json_number(r.statistic);
  j["p_value"] = json_number(r.p_value);
  j["effect"] = json_number(r.effect);
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  return j;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw StatsError("normal_quantile: p outside [0,1]");
  }
  // Acklam's rational approximation followed by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * 3.14159265358979323846) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 10000;

double gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double beta_continued_fraction(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0 || x < 0) throw StatsError("regularized_gamma_p: invalid arguments");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw StatsError("regularized_gamma_q: invalid arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (a <= 0 || b <= 0 || x < 0 || x > 1) throw StatsError("regularized_beta: invalid arguments");
  if (x == 0 || x == 1) return x;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double chi_squared_sf(double x, double df) {
  if (x <= 0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

double student_t_two_sided(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return regularized_beta(df / 2.0, 0.5, df / (df + t * t));
}

std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double hodges_lehmann(std::span<const double> a, std::span<const double> b) {
  std::vector<double> diffs;
  diffs.reserve(a.size() * b.size());
  for (double x : a) {
    for (double y : b) diffs.push_back(x - y);
  }
  return median(std::move(diffs));
}

StatResult wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                            RankSumMode mode) {
  if (a.empty() || b.empty()) throw StatsError("rank-sum test needs two non-empty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);

  // Doubled midranks are integers, which keeps the exact path free of rounding.
  std::vector<std::int64_t> twice(n);
  for (std::size_t i = 0; i < n; ++i) twice[i] = std::llround(ranks[i] * 2.0);
  const std::int64_t observed = std::accumulate(twice.begin(), twice.begin() + static_cast<std::ptrdiff_t>(na),
                                                std::int64_t{0});

  StatResult r;
  r.n1 = na;
  r.n2 = nb;
  r.statistic = static_cast<double>(observed) / 2.0 - static_cast<double>(na * (na + 1)) / 2.0;
  r.effect = hodges_lehmann(a, b);

  const bool exact = mode == RankSumMode::kExact ||
                     (mode == RankSumMode::kAuto && n <= kExactRankSumLimit);
  if (exact) {
    // ways[k][s]: number of k-subsets of the pooled ranks with doubled sum s.
    const std::int64_t max_sum = std::accumulate(twice.begin(), twice.end(), std::int64_t{0});
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = static_cast<std::size_t>(twice[i]);
      for (std::size_t k = std::min(i + 1, na); k >= 1; --k) {
        auto& dst = ways[k];
        const auto& src = ways[k - 1];
        for (std::size_t s = static_cast<std::size_t>(max_sum); s >= w; --s) {
          if (src[s - w] != 0.0) dst[s] += src[s - w];
          if (s == w) break;
        }
      }
    }
    // Doubled null mean of the rank sum of `a`.
    const std::int64_t center = static_cast<std::int64_t>(na * (n + 1));
    const std::int64_t obs_dev = std::llabs(observed - center);
    double extreme = 0.0;
    double total = 0.0;
    for (std::size_t s = 0; s < ways[na].size(); ++s) {
      const double c = ways[na][s];
      if (c == 0.0) continue;
      total += c;
      if (std::llabs(static_cast<std::int64_t>(s) - center) >= obs_dev) extreme += c;
    }
    r.p_value = std::min(1.0, extreme / total);
    r.method = Method::kRankSumExact;
    return r;
  }

  // Normal approximation with tie correction and continuity correction.
  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(nb);
  const double dn = static_cast<double>(n);
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = dna * dnb / 2.0;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  r.method = Method::kRankSumNormal;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double dev = std::max(0.0, std::fabs(r.statistic - mean) - 0.5);
  const double z = dev / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

StatResult proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw StatsError("proportion test needs n1, n2 >= 1");
  if (k1 > n1 || k2 > n2) throw StatsError("proportion test needs k <= n");
  StatResult r;
  r.method = Method::kChiSquared;
  r.n1 = n1;
  r.n2 = n2;
  r.effect = static_cast<double>(k1) / static_cast<double>(n1) -
             static_cast<double>(k2) / static_cast<double>(n2);
  const double obs[2][2] = {{static_cast<double>(k1), static_cast<double>(n1 - k1)},
                            {static_cast<double>(k2), static_cast<double>(n2 - k2)}};
  const double rows[2] = {static_cast<double>(n1), static_cast<double>(n2)};
  const double cols[2] = {static_cast<double>(k1 + k2), static_cast<double>(n1 + n2 - k1 - k2)};
  const double total = rows[0] + rows[1];
  if (cols[0] == 0.0 || cols[1] == 0.0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  const double yates = std::min(0.5, std::fabs(obs[0][0] - rows[0] * cols[0] / total));
  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double e = rows[i] * cols[j] / total;
      const double dev = std::fabs(obs[i][j] - e) - yates;
      chi2 += dev * dev / e;
    }
  }
  r.statistic = chi2;
  r.p_value = chi_squared_sf(chi2, 1.0);
  return r;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw StatsError("correlation needs equal-length vectors");
  if (x.size() < min_n) {
    throw StatsError("correlation needs at least " + std::to_string(min_n) + " observations");
  }
}

// Correlation of two already-centered vectors and its t-test p-value.
StatResult correlate_centered(std::span<const double> cx, std::span<const double> cy, double df,
                              Method method) {
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    sxx += cx[i] * cx[i];
    syy += cy[i] * cy[i];
    sxy += cx[i] * cy[i];
  }
  if (sxx <= 0.0 || syy <= 0.0) throw StatsError("zero variance");
  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::clamp(rho, -1.0, 1.0);
  StatResult r;
  r.method = method;
  r.statistic = rho;
  r.effect = rho;
  r.n1 = cx.size();
  r.n2 = cy.size();
  if (df <= 0) {
    r.p_value = std::numeric_limits<double>::quiet_NaN();
  } else if (std::fabs(rho) >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    r.p_value = student_t_two_sided(t, df);
  }
  return r;
}

std::vector<double> centered(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

StatResult pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 3);
  if (constant(x) || constant(y)) throw StatsError("zero variance");
  const auto cx = centered(x);
  const auto cy = centered(y);
  return correlate_centered(cx, cy, static_cast<double>(x.size()) - 2.0, Method::kPearson);
}

StatResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 3);
  if (constant(x) || constant(y)) throw StatsError("zero variance");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  auto r = pearson(rx, ry);
  r.method = Method::kSpearman;
  return r;
}

StatResult partial_pearson(std::span<const double> x, std::span<const double> y,
                           const std::vector<std::vector<double>>& controls) {
  if (controls.empty()) return pearson(x, y);
  const std::size_t n = x.size();
  const std::size_t k = controls.size();
  check_pair(x, y, 3 + k);
  if (constant(x) || constant(y)) throw StatsError("zero variance");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (controls[c].size() != n) throw StatsError("control length differs from x");
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c + 1)) = controls[c][i];
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  auto residual = [&](std::span<const double> v) {
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) target(static_cast<Eigen::Index>(i)) = v[i];
    const Eigen::VectorXd fit = design * qr.solve(target);
    const Eigen::VectorXd res = target - fit;
    const double total = (target.array() - target.mean()).square().sum();
    // Residual variance indistinguishable from zero: v is explained by controls.
    if (res.squaredNorm() <= 1e-12 * total) throw StatsError("zero variance");
    return std::vector<double>(res.data(), res.data() + n);
  };
  const auto rx = residual(x);
  const auto ry = residual(y);
  const double df = static_cast<double>(n) - 2.0 - static_cast<double>(k);
  return correlate_centered(rx, ry, df, Method::kPartialPearson);
}

std::pair<double, double> wilson_ci(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0) throw StatsError("wilson_ci needs n >= 1");
  if (k > n) throw StatsError("wilson_ci needs k <= n");
  if (!(level > 0.0 && level < 1.0)) throw StatsError("wilson_ci level must be in (0,1)");
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  const double dn = static_cast<double>(n);
  const double p = static_cast<double>(k) / dn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / dn;
  const double center = (p + z2 / (2.0 * dn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / dn + z2 / (4.0 * dn * dn));
  double lo = std::clamp(center - half, 0.0, 1.0);
  double hi = std::clamp(center + half, 0.0, 1.0);
  if (k == 0) lo = 0.0;
  if (k == n) hi = 1.0;
  return {lo, hi};
}

BootstrapSummary bootstrap_score_centroids(const DialogueSet& ds, std::size_t sample_size,
                                           std::size_t n_samples, std::uint64_t seed) {
  if (sample_size == 0) throw StatsError("bootstrap sample size must be positive");
  if (ds.size() < sample_size) {
    throw StatsError("bootstrap needs at least " + std::to_string(sample_size) +
                     " dialogues, got " + std::to_string(ds.size()));
  }
  if (n_samples < 100) throw StatsError("bootstrap needs n_samples >= 100");
  BootstrapSummary out;
  out.sample_size = sample_size;
  out.n_samples = n_samples;
  out.seed = seed;
  out.samples.reserve(n_samples);

  const auto& dialogues = ds.dialogues();
  std::vector<std::uint32_t> order(dialogues.size());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  const std::size_t per_pass = dialogues.size() / sample_size;
  // Integer counts keep the centroid exact for homogeneous inputs.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  counts.reserve(n_samples);
  while (counts.size() < n_samples) {
    rng.shuffle(order);
    for (std::size_t chunk = 0; chunk < per_pass && counts.size() < n_samples; ++chunk) {
      std::uint64_t ff = 0, mm = 0;
      for (std::size_t i = chunk * sample_size; i < (chunk + 1) * sample_size; ++i) {
        const auto& d = dialogues[order[i]];
        if (d.g1 == Gender::kFemale && d.g2 == Gender::kFemale && !d.m) ++ff;
        if (d.g1 == Gender::kMale && d.g2 == Gender::kMale && !d.f) ++mm;
      }
      counts.emplace_back(ff, mm);
    }
  }
  const double size = static_cast<double>(sample_size);
  const double n = static_cast<double>(counts.size());
  std::uint64_t sum_f = 0, sum_m = 0;
  for (const auto& [f, m] : counts) {
    sum_f += f;
    sum_m += m;
    out.samples.emplace_back(static_cast<double>(f) / size, static_cast<double>(m) / size);
  }
  const double mean_f = static_cast<double>(sum_f) / n;
  const double mean_m = static_cast<double>(sum_m) / n;
  double vf = 0, vm = 0;
  for (const auto& [f, m] : counts) {
    vf += (static_cast<double>(f) - mean_f) * (static_cast<double>(f) - mean_f);
    vm += (static_cast<double>(m) - mean_m) * (static_cast<double>(m) - mean_m);
  }
  out.centroid = {mean_f / size, mean_m / size};
  out.sd = {std::sqrt(vf / (n - 1.0)) / size, std::sqrt(vm / (n - 1.0)) / size};
  return out;
}

}  // namespace bechdel
