#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace abo::harness {

/// Per-iteration Monte-Carlo summary of one algorithm on one case.
struct AggregateStats {
  std::string algorithm;
  int n_effective = 0;
  int n_failed = 0;
  std::vector<double> mean_regret;
  std::vector<double> sd_regret;
  std::vector<double> mean_hf_weight;  // empty unless the algorithm adapts a weight
  std::vector<double> sd_hf_weight;

  double band_lower(std::size_t t) const { return mean_regret[t] - 2.0 * sd_regret[t]; }
  double band_upper(std::size_t t) const { return mean_regret[t] + 2.0 * sd_regret[t]; }
};

namespace detail {

// Column-wise mean and sample standard deviation (0 for a single row).
inline void column_moments(const std::vector<std::vector<double>>& rows, std::vector<double>& mean,
                           std::vector<double>& sd) {
  mean.clear();
  sd.clear();
  if (rows.empty()) return;
  const std::size_t len = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != len) throw std::invalid_argument("aggregate: traces have different lengths");
  }
  const double n = static_cast<double>(rows.size());
  mean.assign(len, 0.0);
  sd.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double s = 0.0;
    for (const auto& r : rows) s += r[t];
    const double m = s / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[t] - m) * (r[t] - m);
    mean[t] = m;
    sd[t] = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
}

}  // namespace detail

/// `lf_weights` holds w_lf traces; they are reported as HF weight 1 - w_lf.
inline AggregateStats aggregate(std::string algorithm, const std::vector<std::vector<double>>& regrets,
                                const std::vector<std::vector<double>>& lf_weights = {}) {
  AggregateStats s;
  s.algorithm = std::move(algorithm);
  s.n_effective = static_cast<int>(regrets.size());
  detail::column_moments(regrets, s.mean_regret, s.sd_regret);
  if (!lf_weights.empty()) {
    std::vector<std::vector<double>> hf(lf_weights.size());
    for (std::size_t i = 0; i < lf_weights.size(); ++i) {
      hf[i].reserve(lf_weights[i].size());
      for (double w : lf_weights[i]) hf[i].push_back(1.0 - w);
    }
    detail::column_moments(hf, s.mean_hf_weight, s.sd_hf_weight);
  }
  return s;
}

struct SignTestResult {
  int n_negative = 0;
  int n_positive = 0;
  int n_ties = 0;
  double p_value = 1.0;  // two-sided

  bool rejects(double level = 0.05) const { return p_value < level; }
};

/// Two-sided exact sign test on paired differences; zero differences are
/// dropped.
inline SignTestResult sign_test(std::span<const double> differences) {
  SignTestResult r;
  for (double d : differences) {
    if (d < 0.0) ++r.n_negative;
    else if (d > 0.0) ++r.n_positive;
    else ++r.n_ties;
  }
  const int n = r.n_negative + r.n_positive;
  if (n == 0) return r;
  const int k = std::min(r.n_negative, r.n_positive);
  // P(X <= k), X ~ Binomial(n, 1/2), summed in log space.
  double tail = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                            n * std::log(2.0);
    tail += std::exp(log_term);
  }
  r.p_value = std::min(1.0, 2.0 * tail);
  return r;
}

}  // namespace abo::harness
