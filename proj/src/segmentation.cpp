#include "bechdel/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "bechdel/parallel.hpp"

namespace bechdel {

nlohmann::ordered_json to_json(const BimodalFit& fit) {
  nlohmann::ordered_json j;
  j["alpha"] = json_number(fit.alpha);
  j["tau"] = json_number(fit.tau);
  j["beta"] = json_number(fit.beta);
  j["ks"] = json_number(fit.ks_distance);
  j["n_head"] = fit.n_head;
  j["n_tail"] = fit.n_tail;
  j["n_gaps"] = fit.n_gaps;
  j["t_min"] = json_number(fit.t_min);
  j["candidates"] = fit.candidates;
  return j;
}

namespace {

bool in_pair(const Message& m, const AuthorPair& pair, const std::string*& other) {
  if (m.author_id == pair.first) {
    other = &pair.second;
  } else if (m.author_id == pair.second) {
    other = &pair.first;
  } else {
    return false;
  }
  return std::find(m.mentioned_ids.begin(), m.mentioned_ids.end(), *other) !=
         m.mentioned_ids.end();
}

void sort_stream(std::vector<const Message*>& stream) {
  std::stable_sort(stream.begin(), stream.end(), [](const Message* a, const Message* b) {
    return a->timestamp < b->timestamp;
  });
}

// d/dalpha of the truncated power-law log-likelihood, for n gaps with
// sum_log = sum(ln(x / t_min)) and ratio = tau / t_min.
double alpha_score(double alpha, double n, double sum_log, double ratio) {
  const double log_ratio = std::log(ratio);
  const double tail = std::exp((1.0 - alpha) * log_ratio);  // ratio^(1-alpha)
  return n / (alpha - 1.0) - sum_log - n * log_ratio * tail / (1.0 - tail);
}

double solve_alpha(double n, double sum_log, double ratio, const FitOptions& o) {
  double lo = o.alpha_low;
  double hi = o.alpha_high;
  if (alpha_score(lo, n, sum_log, ratio) <= 0.0) return lo;
  if (alpha_score(hi, n, sum_log, ratio) >= 0.0) return hi;
  while (hi - lo > o.alpha_rel_tol * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (alpha_score(mid, n, sum_log, ratio) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<const Message*> pair_stream(const std::vector<Message>& messages,
                                        const AuthorPair& pair) {
  std::vector<const Message*> stream;
  const std::string* other = nullptr;
  for (const auto& m : messages) {
    if (in_pair(m, pair, other)) stream.push_back(&m);
  }
  sort_stream(stream);
  return stream;
}

std::vector<double> stream_gaps(const std::vector<const Message*>& stream) {
  std::vector<double> gaps;
  if (stream.size() < 2) return gaps;
  gaps.reserve(stream.size() - 1);
  for (std::size_t i = 1; i < stream.size(); ++i) {
    const auto d = stream[i]->timestamp - stream[i - 1]->timestamp;
    gaps.push_back(d <= 0 ? 1.0 : static_cast<double>(d));
  }
  return gaps;
}

std::vector<double> inter_event_gaps(const std::vector<Message>& messages, const AuthorPair& pair) {
  return stream_gaps(pair_stream(messages, pair));
}

double truncated_power_law_alpha(std::span<const double> gaps, double t_min, double tau,
                                 const FitOptions& options) {
  if (!(t_min > 0.0) || !(tau > t_min)) throw FitError("need 0 < t_min < tau");
  double n = 0.0;
  double sum_log = 0.0;
  for (double x : gaps) {
    if (x < t_min || x > tau) continue;
    n += 1.0;
    sum_log += std::log(x / t_min);
  }
  if (n == 0.0) throw FitError("insufficient data");
  return solve_alpha(n, sum_log, tau / t_min, options);
}

double truncated_power_law_cdf(double x, double alpha, double t_min, double tau) {
  if (x <= t_min) return 0.0;
  if (x >= tau) return 1.0;
  const double num = 1.0 - std::pow(x / t_min, 1.0 - alpha);
  const double den = 1.0 - std::pow(tau / t_min, 1.0 - alpha);
  return num / den;
}

BimodalFit fit_bimodal(std::vector<double> gaps, const FitOptions& o) {
  if (!(o.t_min > 0.0)) throw FitError("t_min must be positive");
  gaps.erase(std::remove_if(gaps.begin(), gaps.end(), [&](double g) { return !(g >= o.t_min); }),
             gaps.end());
  if (gaps.size() < std::max<std::size_t>(o.min_gaps, 2)) throw FitError("insufficient data");
  std::sort(gaps.begin(), gaps.end());
  if (gaps.front() == gaps.back()) throw FitError("degenerate distribution");

  const std::size_t n = gaps.size();
  std::vector<double> prefix_log(n + 1, 0.0);
  std::vector<double> prefix_sum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix_log[i + 1] = prefix_log[i] + std::log(gaps[i] / o.t_min);
    prefix_sum[i + 1] = prefix_sum[i] + gaps[i];
  }
  // Distinct values and the index one past their last occurrence.
  std::vector<double> values;
  std::vector<std::size_t> run_end;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n || gaps[i + 1] != gaps[i]) {
      values.push_back(gaps[i]);
      run_end.push_back(i + 1);
    }
  }

  const auto q_index = [&](double q) {
    return static_cast<std::size_t>(std::llround(q * static_cast<double>(n - 1)));
  };
  const double lo_value = gaps[q_index(o.lower_quantile)];
  const double hi_value = gaps[q_index(o.upper_quantile)];
  std::vector<std::size_t> candidates;  // indices into values
  for (std::size_t v = 0; v < values.size(); ++v) {
    const double tau = values[v];
    if (tau < lo_value || tau > hi_value || !(tau > o.t_min)) continue;
    if (run_end[v] < o.min_head || run_end[v] >= n) continue;
    candidates.push_back(v);
  }
  if (candidates.empty()) throw FitError("degenerate distribution");
  if (candidates.size() > o.max_candidates && o.max_candidates >= 2) {
    std::vector<std::size_t> thinned;
    const double log_lo = std::log(values[candidates.front()]);
    const double log_hi = std::log(values[candidates.back()]);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < o.max_candidates; ++k) {
      const double target =
          std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) /
                                static_cast<double>(o.max_candidates - 1));
      while (pos + 1 < candidates.size() && values[candidates[pos]] < target) ++pos;
      if (thinned.empty() || thinned.back() != candidates[pos]) thinned.push_back(candidates[pos]);
    }
    candidates = std::move(thinned);
  }

  BimodalFit best;
  best.ks_distance = 2.0;
  best.n_gaps = n;
  best.t_min = o.t_min;
  best.candidates = candidates.size();
  const double dn = static_cast<double>(n);
  for (const std::size_t v : candidates) {
    const double tau = values[v];
    const std::size_t head = run_end[v];
    const std::size_t tail = n - head;
    const double alpha = solve_alpha(static_cast<double>(head), prefix_log[head], tau / o.t_min, o);
    const double tail_excess = (prefix_sum[n] - prefix_sum[head]) - static_cast<double>(tail) * tau;
    if (!(tail_excess > 0.0)) continue;
    const double beta = static_cast<double>(tail) / tail_excess;
    const double norm = 1.0 - std::pow(tau / o.t_min, 1.0 - alpha);
    const double weight = static_cast<double>(head) / dn;

    double ks = 0.0;
    std::size_t before = 0;
    if (o.ks_scope == KsScope::kHead) {
      const double dh = static_cast<double>(head);
      for (std::size_t u = 0; u <= v; ++u) {
        const double model = (1.0 - std::pow(values[u] / o.t_min, 1.0 - alpha)) / norm;
        ks = std::max({ks, std::fabs(model - static_cast<double>(before) / dh),
                       std::fabs(model - static_cast<double>(run_end[u]) / dh)});
        before = run_end[u];
        if (ks >= best.ks_distance) break;
      }
    } else {
      for (std::size_t u = 0; u < values.size(); ++u) {
        const double x = values[u];
        const double model =
            x <= tau ? weight * (1.0 - std::pow(x / o.t_min, 1.0 - alpha)) / norm
                     : weight + (1.0 - weight) * -std::expm1(-beta * (x - tau));
        ks = std::max({ks, std::fabs(model - static_cast<double>(before) / dn),
                       std::fabs(model - static_cast<double>(run_end[u]) / dn)});
        before = run_end[u];
        if (ks >= best.ks_distance) break;
      }
    }
    if (ks < best.ks_distance) {
      best.ks_distance = ks;
      best.alpha = alpha;
      best.tau = tau;
      best.beta = beta;
      best.n_head = head;
      best.n_tail = tail;
    }
  }
  if (best.ks_distance > 1.0) throw FitError("degenerate distribution");
  return best;
}

std::vector<Dialogue> split_stream_dialogues(const std::vector<const Message*>& stream,
                                             const AuthorPair& pair, double tau,
                                             const ReferenceLexicon& lex, PairGenders genders) {
  if (!(tau > 0.0)) throw FitError("tau must be positive");
  std::vector<Dialogue> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::vector<std::string_view> texts;
    std::vector<std::string> ids;
    texts.reserve(end - start);
    ids.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) {
      texts.emplace_back(stream[k]->text);
      ids.push_back(stream[k]->msg_id);
    }
    out.push_back(make_dialogue(genders.first, genders.second, {pair.first, pair.second},
                                std::move(ids), Origin::kStream, "", texts, lex));
  };
  for (std::size_t i = 1; i < stream.size(); ++i) {
    const auto gap = static_cast<double>(stream[i]->timestamp - stream[i - 1]->timestamp);
    if (gap > tau) {
      emit(i);
      start = i;
    }
  }
  if (!stream.empty()) emit(stream.size());
  return out;
}

std::vector<Dialogue> split_stream_dialogues(const std::vector<Message>& stream,
                                             const AuthorPair& pair, double tau,
                                             const ReferenceLexicon& lex, PairGenders genders) {
  std::vector<const Message*> ptrs;
  ptrs.reserve(stream.size());
  for (const auto& m : stream) ptrs.push_back(&m);
  return split_stream_dialogues(ptrs, pair, tau, lex, genders);
}

SegmentResult segment_corpus(const std::vector<Message>& messages, const GenderMap& genders,
                             const ReferenceLexicon& lex, const SegmentOptions& options) {
  SegmentResult result;
  result.pairs = filter_interacting_pairs(messages, options.min_mentions, options.mention_rule);

  std::unordered_map<std::string, std::size_t> index;
  index.reserve(result.pairs.size() * 2);
  for (std::size_t i = 0; i < result.pairs.size(); ++i) {
    index.emplace(result.pairs[i].first + '\x1f' + result.pairs[i].second, i);
  }
  std::vector<std::vector<const Message*>> streams(result.pairs.size());
  std::string key;
  for (const auto& m : messages) {
    for (std::size_t k = 0; k < m.mentioned_ids.size(); ++k) {
      const auto& target = m.mentioned_ids[k];
      if (target == m.author_id) continue;
      if (std::find(m.mentioned_ids.begin(), m.mentioned_ids.begin() + static_cast<std::ptrdiff_t>(k),
                    target) != m.mentioned_ids.begin() + static_cast<std::ptrdiff_t>(k)) {
        continue;
      }
      const bool author_first = m.author_id < target;
      key = author_first ? m.author_id : target;
      key.push_back('\x1f');
      key += author_first ? target : m.author_id;
      if (auto it = index.find(key); it != index.end()) streams[it->second].push_back(&m);
    }
  }
  parallel_for(streams.size(), options.threads, [&](std::size_t i) { sort_stream(streams[i]); });

  std::vector<std::vector<double>> pair_gaps(streams.size());
  parallel_for(streams.size(), options.threads,
               [&](std::size_t i) { pair_gaps[i] = stream_gaps(streams[i]); });

  if (options.tau_override) {
    result.tau = *options.tau_override;
  } else {
    std::vector<double> pooled;
    for (const auto& g : pair_gaps) pooled.insert(pooled.end(), g.begin(), g.end());
    result.pooled_fit = fit_bimodal(std::move(pooled), options.fit);
    result.tau = result.pooled_fit->tau;
  }

  std::vector<double> taus(streams.size(), result.tau);
  if (options.per_pair && !options.tau_override) {
    std::vector<char> individual(streams.size(), 0);
    parallel_for(streams.size(), options.threads, [&](std::size_t i) {
      if (pair_gaps[i].size() < options.fit.min_gaps) return;
      try {
        taus[i] = fit_bimodal(pair_gaps[i], options.fit).tau;
        individual[i] = 1;
      } catch (const FitError&) {
        // Keeps the pooled cutoff.
      }
    });
    result.pairs_fitted_individually =
        static_cast<std::size_t>(std::count(individual.begin(), individual.end(), 1));
  }

  auto gender_of = [&](const std::string& id) {
    auto it = genders.find(id);
    return it == genders.end() ? Gender::kUnknown : it->second;
  };
  std::vector<std::vector<Dialogue>> per_pair(streams.size());
  parallel_for(streams.size(), options.threads, [&](std::size_t i) {
    const auto& pair = result.pairs[i];
    per_pair[i] = split_stream_dialogues(streams[i], pair, taus[i], lex,
                                         {gender_of(pair.first), gender_of(pair.second)});
  });
  for (auto& d : per_pair) {
    std::move(d.begin(), d.end(), std::back_inserter(result.dialogues));
  }
  return result;
}

}  // namespace bechdel
