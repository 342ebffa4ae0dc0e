#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "abo/types.hpp"

namespace abo {

/// Product of Gaussian experts: precisions add, means are precision-weighted.
inline GaussianBelief poe_fuse(std::span<const GaussianBelief> beliefs) {
  if (beliefs.empty()) throw std::domain_error("poe_fuse: no experts");
  double precision = 0.0;
  double weighted_mean = 0.0;
  for (const auto& b : beliefs) {
    if (!(b.sd > 0.0)) throw std::domain_error("poe_fuse: every expert needs sd > 0");
    const double p = 1.0 / (b.sd * b.sd);
    precision += p;
    weighted_mean += b.mean * p;
  }
  return {weighted_mean / precision, std::sqrt(1.0 / precision)};
}

/// Regularized (dynamically weighted) posterior of the HF expert tempered by
/// the LF expert:  p_reg ∝ p_hf^(1 - w_lf) · p_lf^(w_lf).
struct FusedBelief {
  double mean = 0.0;
  double sd = 0.0;
};

inline FusedBelief dwpoe_fuse(const GaussianBelief& hf, const GaussianBelief& lf, double w_lf) {
  if (!(hf.sd > 0.0) || !(lf.sd > 0.0)) throw std::domain_error("dwpoe_fuse: expert sd must be > 0");
  if (!(w_lf >= 0.0 && w_lf < 1.0)) throw std::domain_error("dwpoe_fuse: w_lf must lie in [0, 1)");
  // w_lf == 0 must reproduce the HF belief bit for bit.
  if (w_lf == 0.0) return {hf.mean, hf.sd};

  const double w_hf_prec = (1.0 - w_lf) / (hf.sd * hf.sd);
  const double w_lf_prec = w_lf / (lf.sd * lf.sd);
  const double total = w_hf_prec + w_lf_prec;
  if (!(total > 0.0)) throw std::domain_error("dwpoe_fuse: both weighted precisions vanish");
  return {(hf.mean * w_hf_prec + lf.mean * w_lf_prec) / total, std::sqrt(1.0 / total)};
}

/// LF-expert weight with forgetting factor alpha.
struct WeightState {
  double w_lf = 0.5;
  double alpha = 0.9;

  void validate() const {
    if (!(w_lf >= 0.0 && w_lf < 1.0)) throw std::domain_error("WeightState: w_lf must lie in [0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("WeightState: alpha must lie in (0, 1]");
  }
};

inline WeightState initial_weight(double w_lf = 0.5, double alpha = 0.9) {
  WeightState s{w_lf, alpha};
  s.validate();
  return s;
}

/// Prior prediction of the next weight: w^a / (w^a + (1-w)^a).
inline double weight_predict(const WeightState& state) {
  const double w = state.w_lf;
  if (w == 0.0 || w == 0.5) return w;
  const double a = std::pow(w, state.alpha);
  const double b = std::pow(1.0 - w, state.alpha);
  return a / (a + b);
}

namespace detail {

inline double normal_log_pdf(double y, const GaussianBelief& b) {
  const double z = (y - b.mean) / b.sd;
  return -0.5 * z * z - std::log(b.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace detail

// Both log-likelihoods below this carry no usable information.
inline constexpr double kDegenerateLogLikelihood = -700.0;

/// Forgetting step followed, on an improving observation, by a Bayes update
/// of the LF weight with the two experts' predictive likelihoods at the new
/// point. The ratio is formed in log space.
inline WeightState weight_update(const WeightState& state, double y_new, double y_best_so_far,
                                 const GaussianBelief& lf_pred, const GaussianBelief& hf_pred) {
  if (!(lf_pred.sd > 0.0) || !(hf_pred.sd > 0.0)) {
    throw std::domain_error("weight_update: predictive sd must be > 0");
  }
  WeightState next = state;
  const double w_hat = weight_predict(state);
  next.w_lf = w_hat;
  if (!(y_new > y_best_so_far)) return next;
  if (w_hat == 0.0) return next;

  const double log_lf = detail::normal_log_pdf(y_new, lf_pred);
  const double log_hf = detail::normal_log_pdf(y_new, hf_pred);
  if (log_lf < kDegenerateLogLikelihood && log_hf < kDegenerateLogLikelihood) return next;

  // w' = 1 / (1 + exp(-(log w + log l_lf - log(1-w) - log l_hf)))
  const double logit = (std::log(w_hat) + log_lf) - (std::log1p(-w_hat) + log_hf);
  double w = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
  // Keep the weight strictly below one.
  if (!(w < 1.0)) w = std::nextafter(1.0, 0.0);
  next.w_lf = w;
  return next;
}

}  // namespace abo
