#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bechdel/gender.hpp"
#include "bechdel/ingest.hpp"
#include "bechdel/metrics.hpp"

namespace bechdel {

// Inter-event time model: a power law truncated to [t_min, tau] for gaps
// inside a dialogue, and a shifted exponential with rate beta beyond tau.
struct BimodalFit {
  double alpha = 0.0;
  double tau = 0.0;   // seconds
  double beta = 0.0;  // 1/seconds
  double ks_distance = 1.0;
  std::size_t n_head = 0;
  std::size_t n_tail = 0;
  std::size_t n_gaps = 0;
  double t_min = 1.0;
  std::size_t candidates = 0;
};

nlohmann::ordered_json to_json(const BimodalFit& fit);

// Which distribution the KS distance of a candidate cutoff is measured on.
enum class KsScope {
  // Gaps in [t_min, tau] against the truncated power law alone.
  kHead,
  // All gaps >= t_min against the full two-regime mixture.
  kBimodal,
};

struct FitOptions {
  double t_min = 1.0;
  std::size_t min_gaps = 50;
  std::size_t min_head = 10;
  // Candidate cutoffs are distinct gap values between these quantiles.
  double lower_quantile = 0.05;
  double upper_quantile = 0.99;
  // Larger candidate sets are thinned to a log-spaced subset of this size.
  std::size_t max_candidates = 2000;
  KsScope ks_scope = KsScope::kBimodal;
  double alpha_low = 1.01;
  double alpha_high = 5.0;
  double alpha_rel_tol = 1e-6;
};

// Messages of `pair` (authored by one member and mentioning the other) in
// timestamp order; ties keep input order.
std::vector<const Message*> pair_stream(const std::vector<Message>& messages,
                                        const AuthorPair& pair);

// Successive timestamp differences of the pair's stream; zero differences
// become the one-second resolution floor. Fewer than two messages -> empty.
std::vector<double> inter_event_gaps(const std::vector<Message>& messages, const AuthorPair& pair);
std::vector<double> stream_gaps(const std::vector<const Message*>& stream);

// Maximum-likelihood exponent of a power law normalized on [t_min, tau],
// using only the gaps that fall inside that interval. Solves the score
// equation by bisection on [alpha_low, alpha_high].
double truncated_power_law_alpha(std::span<const double> gaps, double t_min, double tau,
                                 const FitOptions& options = {});

// CDF of the truncated power law on [t_min, tau].
double truncated_power_law_cdf(double x, double alpha, double t_min, double tau);

// Scans candidate cutoffs and keeps the one with the smallest KS distance.
// Throws FitError("insufficient data") or FitError("degenerate distribution").
BimodalFit fit_bimodal(std::vector<double> gaps, const FitOptions& options = {});

struct PairGenders {
  Gender first = Gender::kUnknown;
  Gender second = Gender::kUnknown;
};

// Cuts a time-ordered pair stream after every gap strictly longer than tau.
std::vector<Dialogue> split_stream_dialogues(const std::vector<const Message*>& stream,
                                             const AuthorPair& pair, double tau,
                                             const ReferenceLexicon& lex, PairGenders genders);
std::vector<Dialogue> split_stream_dialogues(const std::vector<Message>& stream,
                                             const AuthorPair& pair, double tau,
                                             const ReferenceLexicon& lex, PairGenders genders);

struct SegmentOptions {
  FitOptions fit;
  std::int64_t min_mentions = 10;
  MentionRule mention_rule = MentionRule::kBidirectionalSum;
  std::optional<double> tau_override;
  // Fit each pair with enough gaps separately; others use the pooled fit.
  bool per_pair = false;
  unsigned threads = 1;
};

struct SegmentResult {
  std::optional<BimodalFit> pooled_fit;
  double tau = 0.0;
  std::vector<AuthorPair> pairs;
  std::size_t pairs_fitted_individually = 0;
  std::vector<Dialogue> dialogues;  // grouped by pair, pairs in sorted order
};

using GenderMap = std::unordered_map<std::string, Gender>;

// Interacting pairs -> pooled gap fit (unless tau is given) -> per-pair split.
SegmentResult segment_corpus(const std::vector<Message>& messages, const GenderMap& genders,
                             const ReferenceLexicon& lex, const SegmentOptions& options = {});

}  // namespace bechdel
