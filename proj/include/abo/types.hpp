#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace abo {

using Point = Eigen::VectorXd;

/// Raised when a dense factorization cannot be completed even after jitter
/// escalation. Carries the last attempted jitter and a crude conditioning
/// estimate of the matrix that failed.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double jitter, double diag_ratio)
      : std::runtime_error(what), jitter_(jitter), diag_ratio_(diag_ratio) {}

  double jitter() const noexcept { return jitter_; }
  double diag_ratio() const noexcept { return diag_ratio_; }

 private:
  double jitter_;
  double diag_ratio_;
};

/// Pointwise Gaussian belief about f(x).
struct GaussianBelief {
  double mean = 0.0;
  double sd = 0.0;

  double variance() const { return sd * sd; }
};

/// Axis-aligned box, lower < upper componentwise.
class BoxDomain {
 public:
  BoxDomain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() == 0 || lower_.size() != upper_.size()) {
      throw std::invalid_argument("BoxDomain: bounds must be non-empty and of equal dimension");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
        throw std::invalid_argument("BoxDomain: require finite lower < upper in every coordinate");
      }
    }
  }

  static BoxDomain unit(int dim) {
    return BoxDomain(Point::Zero(dim), Point::Ones(dim));
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  Point center() const { return 0.5 * (lower_ + upper_); }
  double diagonal() const { return (upper_ - lower_).norm(); }

  bool contains(const Point& x) const {
    if (x.size() != lower_.size()) return false;
    return ((x.array() >= lower_.array()) && (x.array() <= upper_.array())).all();
  }

  Point clip(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

 private:
  Point lower_;
  Point upper_;
};

/// Paired inputs/outputs. Inputs are stored as the columns of one matrix.
struct Dataset {
  Eigen::MatrixXd inputs;  // dim x n
  Eigen::VectorXd outputs;

  Dataset() = default;
  explicit Dataset(int dim) : inputs(dim, 0), outputs(0) {}
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y) : inputs(std::move(x)), outputs(std::move(y)) {
    if (inputs.cols() != outputs.size()) {
      throw std::invalid_argument("Dataset: number of inputs and outputs differ");
    }
  }

  Eigen::Index size() const { return outputs.size(); }
  int dim() const { return static_cast<int>(inputs.rows()); }
  bool empty() const { return outputs.size() == 0; }

  void push_back(const Point& x, double y) {
    if (inputs.rows() == 0 && inputs.cols() == 0) inputs.resize(x.size(), 0);
    if (x.size() != inputs.rows()) {
      throw std::invalid_argument("Dataset::push_back: input dimension mismatch");
    }
    const Eigen::Index n = size();
    inputs.conservativeResize(Eigen::NoChange, n + 1);
    inputs.col(n) = x;
    outputs.conservativeResize(n + 1);
    outputs[n] = y;
  }
};

}  // namespace abo
