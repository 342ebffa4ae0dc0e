#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace abo::detail {

struct BfgsSettings {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;  // projected gradient, inf-norm
  double value_tolerance = 1e-12;    // relative decrease
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

// Projected BFGS on a box. Variables sitting on a bound with the gradient
// pointing outward are frozen for the step; the line search runs along the
// projected path. `fn(x, grad)` returns the objective and writes the
// gradient; a non-finite return marks an infeasible point.
template <typename Fn>
BfgsResult minimize_bounded(Fn&& fn, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const BfgsSettings& settings = {}) {
  const Eigen::Index n = x0.size();
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v.cwiseMax(lower).cwiseMin(upper);
  };

  BfgsResult res;
  res.x = project(x0);
  res.gradient = Eigen::VectorXd::Zero(n);
  res.value = fn(res.x, res.gradient);
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g_new(n);

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    res.iterations = iter + 1;
    const Eigen::VectorXd& g = res.gradient;

    Eigen::VectorXd free_mask(n);
    double pg_norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lower = res.x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = res.x[i] >= upper[i] && g[i] < 0.0;
      free_mask[i] = (at_lower || at_upper) ? 0.0 : 1.0;
      if (free_mask[i] > 0.0) pg_norm = std::max(pg_norm, std::abs(g[i]));
    }
    if (pg_norm < settings.gradient_tolerance) {
      res.converged = true;
      break;
    }

    const Eigen::MatrixXd masked =
        free_mask.asDiagonal() * inv_hessian * free_mask.asDiagonal();
    Eigen::VectorXd direction = -(masked * g);
    if (direction.dot(g) >= 0.0) {
      inv_hessian.setIdentity();
      direction = -(free_mask.asDiagonal() * g);
    }

    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < settings.max_backtracks; ++bt) {
      x_new = project(res.x + step * direction);
      f_new = fn(x_new, g_new);
      const double decrease = g.dot(x_new - res.x);
      if (std::isfinite(f_new) && f_new <= res.value + settings.armijo * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!inv_hessian.isIdentity()) {
        inv_hessian.setIdentity();
        continue;
      }
      break;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double previous = res.value;
    res.x = x_new;
    res.value = f_new;
    res.gradient = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }

    if (std::abs(previous - f_new) <= settings.value_tolerance * std::max(1.0, std::abs(f_new)) &&
        s.lpNorm<Eigen::Infinity>() < 1e-10) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace abo::detail
