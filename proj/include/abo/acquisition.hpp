#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "abo/fusion.hpp"
#include "abo/random.hpp"
#include "abo/types.hpp"

namespace abo {

/// Exploration coefficient sqrt(beta_t) used by every UCB acquisition.
struct BetaSchedule {
  enum class Kind { constant, log_growth };

  Kind kind = Kind::constant;
  double sqrt_beta = 2.0;  // constant mode
  double delta = 0.1;      // log-growth mode

  static BetaSchedule constant(double value) { return {Kind::constant, value, 0.1}; }
  static BetaSchedule log_growth(double delta = 0.1) { return {Kind::log_growth, 0.0, delta}; }

  /// t counts HF observations (t >= 1).
  double at(int t, int dim) const {
    if (kind == Kind::constant) return sqrt_beta;
    const double tt = std::max(t, 1);
    return std::sqrt(2.0 * std::log(dim * tt * tt * std::numbers::pi * std::numbers::pi / (6.0 * delta)));
  }

  void validate() const {
    if (kind == Kind::constant && !(sqrt_beta > 0.0)) throw std::invalid_argument("BetaSchedule: sqrt_beta must be > 0");
    if (kind == Kind::log_growth && !(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("BetaSchedule: delta must lie in (0, 1)");
    }
  }
};

inline double ucb(const GaussianBelief& belief, double sqrt_beta) { return belief.mean + sqrt_beta * belief.sd; }

inline double regularized_ucb(const FusedBelief& fused, double sqrt_beta) { return fused.mean + sqrt_beta * fused.sd; }

struct CmaesSettings {
  // Total objective evaluations; <= 0 selects evaluations_per_lambda * lambda.
  int budget = 0;
  int evaluations_per_lambda = 100;
  double initial_step_fraction = 0.3;  // of diagonal / sqrt(d)
  int max_resamples = 10;
  double tol_x = 1e-12;  // relative to the domain diagonal
};

struct MaximizeResult {
  Point argmax;
  double value = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

inline int cmaes_population(int dim) { return 4 + static_cast<int>(std::floor(3.0 * std::log(dim))); }

/// (mu/mu_w, lambda)-CMA-ES with rank-mu update, maximizing `objective`
/// over `domain`. Starts at the domain center and returns the best point
/// ever evaluated. Non-finite objective values count as -inf.
template <typename Objective>
MaximizeResult maximize(Objective&& objective, const BoxDomain& domain, Rng& rng,
                        const CmaesSettings& settings = {}) {
  const int n = domain.dim();
  const int lambda = cmaes_population(n);
  const int mu = lambda / 2;
  const int budget = settings.budget > 0 ? settings.budget : settings.evaluations_per_lambda * lambda;
  if (budget < lambda) throw std::invalid_argument("maximize: budget smaller than the population size");

  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double dn = n;
  const double cc = (4.0 + mu_eff / dn) / (dn + 4.0 + 2.0 * mu_eff / dn);
  const double cs = (mu_eff + 2.0) / (dn + mu_eff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mu_eff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dn + 2.0) * (dn + 2.0) + mu_eff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Eigen::VectorXd mean = domain.center();
  double sigma = settings.initial_step_fraction * domain.diagonal() / std::sqrt(dn);
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd inv_sqrt_cov = Eigen::MatrixXd::Identity(n, n);

  std::normal_distribution<double> gauss(0.0, 1.0);
  MaximizeResult best;
  best.argmax = mean;

  std::vector<Eigen::VectorXd> candidates(lambda, Eigen::VectorXd(n));
  std::vector<double> fitness(lambda);
  std::vector<int> order(lambda);
  const double tol = settings.tol_x * domain.diagonal();

  for (int generation = 0; best.evaluations + lambda <= budget; ++generation) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd x(n);
      for (int attempt = 0;; ++attempt) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = gauss(rng);
        x = mean + sigma * (basis * scales.cwiseProduct(z));
        if (domain.contains(x)) break;
        if (attempt + 1 >= settings.max_resamples) {
          x = domain.clip(x);
          break;
        }
      }
      candidates[k] = x;
      const double v = objective(static_cast<const Point&>(x));
      fitness[k] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
      ++best.evaluations;
      if (best.evaluations == 1 || fitness[k] > best.value) {
        best.value = fitness[k];
        best.argmax = x;
      }
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] > fitness[b]; });

    const Eigen::VectorXd old_mean = mean;
    mean.setZero();
    for (int i = 0; i < mu; ++i) mean += weights[i] * candidates[order[i]];
    const Eigen::VectorXd y_w = (mean - old_mean) / sigma;

    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mu_eff) * (inv_sqrt_cov * y_w);
    const double ps_norm = ps.norm();
    const double hsig_denominator = std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (generation + 1)));
    const bool hsig = ps_norm / hsig_denominator / chi_n < 1.4 + 2.0 / (dn + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd yi = (candidates[order[i]] - old_mean) / sigma;
      rank_mu.noalias() += weights[i] * yi * yi.transpose();
    }
    cov = (1.0 - c1 - cmu) * cov +
          c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov) + cmu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    basis = eig.eigenvectors();
    scales = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
    inv_sqrt_cov = basis * scales.cwiseInverse().asDiagonal() * basis.transpose();

    if (!std::isfinite(sigma) || sigma * scales.maxCoeff() < tol) break;
  }
  return best;
}

}  // namespace abo
