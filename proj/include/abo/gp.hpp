#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "abo/detail/bounded_bfgs.hpp"
#include "abo/random.hpp"
#include "abo/types.hpp"

namespace abo {

/// SE-kernel hyperparameters plus constant prior mean.
struct GpHyperparams {
  double kappa0 = 1.0;      // signal variance
  double bandwidth = 1.0;   // h, input units
  double noise_var = 0.0;   // observation noise sigma^2
  double mean_const = 0.0;

  void validate() const {
    if (!(kappa0 > 0.0) || !(bandwidth > 0.0) || !(noise_var >= 0.0) || !std::isfinite(mean_const) ||
        !std::isfinite(kappa0) || !std::isfinite(bandwidth) || !std::isfinite(noise_var)) {
      throw std::invalid_argument("GpHyperparams: require kappa0 > 0, bandwidth > 0, noise_var >= 0, finite values");
    }
  }

  friend bool operator==(const GpHyperparams&, const GpHyperparams&) = default;
};

// Diagonal jitter, relative to kappa0, escalated by x10 on failure.
inline constexpr double kJitterInitial = 1e-10;
inline constexpr double kJitterMax = 1e-4;

inline double kernel_eval(const Point& a, const Point& b, const GpHyperparams& hyper) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kernel_eval: point dimensions differ");
  }
  const double h = hyper.bandwidth;
  return hyper.kappa0 * std::exp(-(a - b).squaredNorm() / (2.0 * h * h));
}

namespace detail {

inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.cols();
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (x.col(i) - x.col(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

inline Eigen::MatrixXd se_gram(const Eigen::MatrixXd& d2, const GpHyperparams& hyper) {
  const double scale = -1.0 / (2.0 * hyper.bandwidth * hyper.bandwidth);
  return hyper.kappa0 * (d2.array() * scale).exp().matrix();
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute value added to the diagonal on top of noise_var
};

// Cholesky of gram + (noise_var + jitter) I with jitter escalation.
inline Factorization factorize(const Eigen::MatrixXd& gram, const GpHyperparams& hyper) {
  const Eigen::Index n = gram.rows();
  Factorization f;
  for (double rel = kJitterInitial; rel <= kJitterMax * 1.0000001; rel *= 10.0) {
    f.jitter = rel * hyper.kappa0;
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += hyper.noise_var + f.jitter;
    f.llt.compute(a);
    if (f.llt.info() == Eigen::Success && f.llt.matrixLLT().diagonal().minCoeff() > 0.0) return f;
  }
  const Eigen::VectorXd diag = gram.diagonal();
  const double ratio = n > 0 ? diag.maxCoeff() / std::max(diag.minCoeff(), std::numeric_limits<double>::min()) : 0.0;
  std::ostringstream msg;
  msg << "GP factorization failed for n=" << n << " (kappa0=" << hyper.kappa0 << ", h=" << hyper.bandwidth
      << ", noise_var=" << hyper.noise_var << ") after jitter escalation to " << f.jitter;
  throw NumericalError(msg.str(), f.jitter, ratio);
}

}  // namespace detail

/// Trained GP surrogate: hyperparameters, training data and the Cholesky
/// state needed for O(n^2) predictions. Immutable once built.
class GpModel {
 public:
  GpModel(Dataset data, const GpHyperparams& hyper) : hyper_(hyper), data_(std::move(data)) {
    hyper_.validate();
    if (data_.empty()) return;
    const Eigen::MatrixXd gram = detail::se_gram(detail::squared_distances(data_.inputs), hyper_);
    auto fact = detail::factorize(gram, hyper_);
    jitter_ = fact.jitter;
    factor_ = fact.llt.matrixL();
    alpha_ = fact.llt.solve((data_.outputs.array() - hyper_.mean_const).matrix());
  }

  GaussianBelief predict(const Point& x) const {
    if (!data_.empty() && x.size() != data_.dim()) {
      throw std::invalid_argument("GpModel::predict: query dimension mismatch");
    }
    if (data_.empty()) return {hyper_.mean_const, std::sqrt(hyper_.kappa0)};

    const Eigen::Index n = data_.size();
    const double scale = -1.0 / (2.0 * hyper_.bandwidth * hyper_.bandwidth);
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k[i] = hyper_.kappa0 * std::exp((data_.inputs.col(i) - x).squaredNorm() * scale);
    }
    const double mean = hyper_.mean_const + k.dot(alpha_);
    factor_.triangularView<Eigen::Lower>().solveInPlace(k);
    const double var = std::clamp(hyper_.kappa0 - k.squaredNorm(), 0.0, hyper_.kappa0);
    return {mean, std::sqrt(var)};
  }

  const GpHyperparams& hyper() const { return hyper_; }
  const Dataset& data() const { return data_; }
  /// Lower-triangular L with L L^T = K + (noise_var + jitter) I.
  const Eigen::MatrixXd& factor() const { return factor_; }
  /// (K + (noise_var + jitter) I)^{-1} (Y - mean_const).
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }

 private:
  GpHyperparams hyper_;
  Dataset data_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

inline GpModel fit_posterior(Dataset data, const GpHyperparams& hyper) {
  if (data.empty()) throw std::invalid_argument("fit_posterior: empty dataset");
  return GpModel(std::move(data), hyper);
}

/// Gradient layout: (log kappa0, log h, log noise_var, mean_const).
using HyperGradient = Eigen::Vector4d;

namespace detail {

// Negative log marginal likelihood; fills `grad` with its gradient when
// non-null.
inline double nlml(const Dataset& data, const GpHyperparams& hyper, HyperGradient* grad) {
  hyper.validate();
  if (data.empty()) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
  const Eigen::Index n = data.size();
  const Eigen::MatrixXd d2 = squared_distances(data.inputs);
  const Eigen::MatrixXd gram = se_gram(d2, hyper);
  const Factorization f = factorize(gram, hyper);

  const Eigen::VectorXd resid = (data.outputs.array() - hyper.mean_const).matrix();
  const Eigen::VectorXd alpha = f.llt.solve(resid);
  const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double value = 0.5 * resid.dot(alpha) + 0.5 * log_det +
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  if (grad != nullptr) {
    // d NLML / d theta = 1/2 tr((A^{-1} - alpha alpha^T) dA/dtheta)
    Eigen::MatrixXd w = f.llt.solve(Eigen::MatrixXd::Identity(n, n));
    w.noalias() -= alpha * alpha.transpose();

    // Jitter scales with kappa0, so it belongs to the kappa0 derivative.
    Eigen::MatrixXd d_kappa = gram;
    d_kappa.diagonal().array() += f.jitter;
    const Eigen::MatrixXd d_bandwidth =
        gram.cwiseProduct(d2) / (hyper.bandwidth * hyper.bandwidth);

    (*grad)[0] = 0.5 * w.cwiseProduct(d_kappa).sum();
    (*grad)[1] = 0.5 * w.cwiseProduct(d_bandwidth).sum();
    (*grad)[2] = 0.5 * hyper.noise_var * w.trace();
    (*grad)[3] = -alpha.sum();
  }
  return value;
}

}  // namespace detail

inline double log_marginal_likelihood(const Dataset& data, const GpHyperparams& hyper) {
  return -detail::nlml(data, hyper, nullptr);
}

/// Analytic gradient of the negative log marginal likelihood over
/// (log kappa0, log h, log noise_var, mean_const).
inline HyperGradient nlml_gradient(const Dataset& data, const GpHyperparams& hyper) {
  HyperGradient g;
  detail::nlml(data, hyper, &g);
  return g;
}

struct FitSettings {
  int restarts = 5;
  std::uint64_t seed = 0;
  // Typically the domain diagonal; sets the bandwidth bounds.
  double length_reference = 1.0;
  double log_kappa_lower = -6.0;
  double log_kappa_upper = 6.0;
  double bandwidth_lower_factor = 0.01;
  double bandwidth_upper_factor = 10.0;
  double log_noise_lower = -12.0;
  double log_noise_upper = 2.0;
  double noise_floor = 1e-8;
  detail::BfgsSettings bfgs{};
};

struct FitResult {
  GpHyperparams hyper;
  double nlml = std::numeric_limits<double>::infinity();
  bool warning = false;  // every start failed numerically; hyper is the best evaluated point
  int failed_starts = 0;
};

namespace detail {

struct ParamBox {
  Eigen::Vector4d lower;
  Eigen::Vector4d upper;
};

inline ParamBox parameter_box(const Dataset& data, const FitSettings& s) {
  const double ymin = data.outputs.minCoeff();
  const double ymax = data.outputs.maxCoeff();
  const double span = std::max(ymax - ymin, 1.0);
  ParamBox box;
  box.lower << s.log_kappa_lower, std::log(s.bandwidth_lower_factor * s.length_reference),
      std::max(s.log_noise_lower, std::log(s.noise_floor)), ymin - span;
  box.upper << s.log_kappa_upper, std::log(s.bandwidth_upper_factor * s.length_reference), s.log_noise_upper,
      ymax + span;
  return box;
}

inline GpHyperparams from_vector(const Eigen::Vector4d& v) {
  return {std::exp(v[0]), std::exp(v[1]), std::exp(v[2]), v[3]};
}

inline Eigen::Vector4d to_vector(const GpHyperparams& h, double noise_floor) {
  return {std::log(h.kappa0), std::log(h.bandwidth), std::log(std::max(h.noise_var, noise_floor)), h.mean_const};
}

}  // namespace detail

/// Multi-start bounded quasi-Newton minimization of the NLML in log space.
/// The caller's `init` is the first start; `restarts` further starts are
/// drawn log-uniformly from the parameter box with `settings.seed`.
inline FitResult fit_hyperparams(const Dataset& data, const GpHyperparams& init, const FitSettings& settings) {
  init.validate();
  FitResult best;
  best.hyper = init;
  if (data.size() < 2) {
    try {
      if (!data.empty()) best.nlml = detail::nlml(data, init, nullptr);
    } catch (const NumericalError&) {
    }
    return best;
  }

  const detail::ParamBox box = detail::parameter_box(data, settings);
  auto objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) -> double {
    HyperGradient grad;
    try {
      const double f = detail::nlml(data, detail::from_vector(v), &grad);
      g = grad;
      return std::isfinite(f) && grad.allFinite() ? f : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
      g = Eigen::VectorXd::Zero(4);
      return std::numeric_limits<double>::infinity();
    }
  };

  Rng rng(settings.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Vector4d> starts;
  starts.push_back(detail::to_vector(init, settings.noise_floor).cwiseMax(box.lower).cwiseMin(box.upper));
  const double ymin = data.outputs.minCoeff();
  const double ymax = data.outputs.maxCoeff();
  for (int r = 0; r < settings.restarts; ++r) {
    Eigen::Vector4d v;
    for (int i = 0; i < 3; ++i) v[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
    v[3] = ymin + unit(rng) * (ymax - ymin);
    starts.push_back(v);
  }

  bool any_success = false;
  Eigen::Vector4d best_vec = starts.front();
  for (const auto& start : starts) {
    const auto res = detail::minimize_bounded(objective, Eigen::VectorXd(start), box.lower, box.upper,
                                              settings.bfgs);
    if (!std::isfinite(res.value)) {
      ++best.failed_starts;
      continue;
    }
    any_success = true;
    if (res.value < best.nlml) {
      best.nlml = res.value;
      best_vec = res.x;
    }
  }
  best.warning = !any_success;
  best.hyper = any_success ? detail::from_vector(best_vec) : init;
  return best;
}

/// Data-driven starting point for fitting: prior variance from the output
/// spread, bandwidth a fifth of the reference length.
inline GpHyperparams default_hyperparams(const Dataset& data, double length_reference) {
  GpHyperparams h;
  h.bandwidth = 0.2 * length_reference;
  h.noise_var = 1e-6;
  if (data.empty()) return h;
  h.mean_const = data.outputs.mean();
  const double var = (data.outputs.array() - h.mean_const).square().mean();
  h.kappa0 = std::clamp(var, std::exp(-6.0), std::exp(6.0));
  if (!(h.kappa0 > 0.0)) h.kappa0 = 1.0;
  return h;
}

}  // namespace abo
