#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abo/random.hpp"
#include "abo/types.hpp"

namespace abo {

using Evaluator = std::function<double(const Point&)>;

/// Objective f paired with its low-fidelity counterpart f_l on a box.
struct ObjectiveCase {
  std::string name;
  int dim = 0;
  BoxDomain domain = BoxDomain::unit(1);
  Evaluator hf;
  Evaluator lf;
  double noise_sd = 0.0;
  double f_star = 0.0;
  Point x_star;
};

/// Low-fidelity variant for case2. `shifted` evaluates the B term at
/// f(x1+0.05, max(0, x2+0.05)); `standard` uses x2-0.05 there, as in the
/// usual Currin low-fidelity model.
enum class CurrinVariant { shifted, standard };

struct CaseOptions {
  double noise_sd = 0.0;
  CurrinVariant currin = CurrinVariant::shifted;
};

namespace benchmarks {

inline void require_dim(const Point& x, int dim, const char* who) {
  if (x.size() != dim) throw std::invalid_argument(std::string(who) + ": wrong input dimension");
}

// Case I: 1D pedagogical pair on [0, 6].
inline double case1_hf(double x) {
  if (!(x >= 0.0 && x <= 6.0)) throw std::domain_error("case1: x outside [0, 6]");
  return 2.0 * std::pow(x, 1.2) * std::sin(2.0 * x) + 2.0;
}

inline double case1_lf(double x) {
  const double f = case1_hf(x);
  return 0.7 * f + (std::pow(x, 1.3) - 0.3) * std::sin(3.0 * x - 0.5) + 4.0 * std::cos(2.0 * x) - 5.0;
}

// Case II: Currin exponential on [0, 1]^2. x2 is floored at 1e-12 where the
// bracket has already saturated at 1.
inline double case2_hf(double x1, double x2) {
  x2 = std::max(x2, 1e-12);
  const double bracket = 1.0 - std::exp(-1.0 / (2.0 * x2));
  const double num = ((2300.0 * x1 + 1900.0) * x1 + 2092.0) * x1 + 60.0;
  const double den = ((100.0 * x1 + 500.0) * x1 + 4.0) * x1 + 20.0;
  return bracket * num / den;
}

inline double case2_lf(double x1, double x2, CurrinVariant variant = CurrinVariant::shifted) {
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const double x2_b = variant == CurrinVariant::shifted ? x2 + 0.05 : x2 - 0.05;
  const double a = case2_hf(unit(x1 + 0.05), unit(x2 + 0.05));
  const double b = case2_hf(unit(x1 + 0.05), unit(std::max(0.0, x2_b)));
  const double c = case2_hf(unit(x1 - 0.05), unit(x2 + 0.05));
  const double d = case2_hf(unit(x1 - 0.05), unit(std::max(0.0, x2 - 0.05)));
  return (a + b + c + d) / 4.0;
}

// Case III: Park function 1 on [0, 1)^4. x1 is floored at 1e-8; the first
// term tends to sqrt(x4 (x2 + x3^2)) / 2 as x1 -> 0.
inline double case3_hf(const Point& x) {
  require_dim(x, 4, "case3");
  const double x1 = std::max(x[0], 1e-8);
  const double a = (x[1] + x[2] * x[2]) * x[3];
  const double ratio = a / (x1 * x1);
  // x1/2 (sqrt(1 + r) - 1) rewritten without cancellation.
  const double first = 0.5 * x1 * ratio / (std::sqrt(1.0 + ratio) + 1.0);
  const double second = (x1 + 3.0 * x[3]) * std::exp(1.0 + std::sin(x[2]));
  return first + second;
}

inline double case3_lf(const Point& x) {
  require_dim(x, 4, "case3");
  return (1.0 + std::sin(x[0]) / 10.0) * case3_hf(x) - 2.0 * x[0] + x[1] * x[1] + x[2] * x[2] + 0.5;
}

// Case IV: Park function 2 on [0, 1]^4 with an affine low-fidelity model.
inline double case4_hf(const Point& x) {
  require_dim(x, 4, "case4");
  return 2.0 / 3.0 * std::exp(x[0] + x[1]) - x[3] * std::sin(x[2]) + x[2];
}

inline double case4_lf(const Point& x) { return 1.2 * case4_hf(x) - 1.0; }

}  // namespace benchmarks

inline const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"case1", "case2", "case3", "case4"};
  return names;
}

/// Registry lookup by name. Reference optima come from
/// tools/reference_optima.py (dense grid + Nelder-Mead polish).
inline ObjectiveCase make_case(std::string_view name, const CaseOptions& options = {}) {
  using namespace benchmarks;
  ObjectiveCase c;
  c.name = std::string(name);
  c.noise_sd = options.noise_sd;
  if (options.noise_sd < 0.0) throw std::invalid_argument("make_case: noise_sd must be >= 0");
  if (name == "case1") {
    c.dim = 1;
    c.domain = BoxDomain(Point::Constant(1, 0.0), Point::Constant(1, 6.0));
    c.hf = [](const Point& x) { require_dim(x, 1, "case1"); return case1_hf(x[0]); };
    c.lf = [](const Point& x) { require_dim(x, 1, "case1"); return case1_lf(x[0]); };
    c.f_star = 12.443771487159943;
    c.x_star = Point::Constant(1, 4.001409941598017);
  } else if (name == "case2") {
    c.dim = 2;
    c.domain = BoxDomain::unit(2);
    c.hf = [](const Point& x) { require_dim(x, 2, "case2"); return case2_hf(x[0], x[1]); };
    c.lf = [variant = options.currin](const Point& x) {
      require_dim(x, 2, "case2");
      return case2_lf(x[0], x[1], variant);
    };
    c.f_star = 13.798722044728438;
    c.x_star = Point(2);
    c.x_star << 0.21666666491429198, 0.0;
  } else if (name == "case3") {
    c.dim = 4;
    c.domain = BoxDomain::unit(4);
    c.hf = case3_hf;
    c.lf = case3_lf;
    c.f_star = 25.589254158606547;
    c.x_star = Point::Ones(4);
  } else if (name == "case4") {
    c.dim = 4;
    c.domain = BoxDomain::unit(4);
    c.hf = case4_hf;
    c.lf = case4_lf;
    c.f_star = 5.9260373992871003;
    c.x_star = Point(4);
    c.x_star << 1.0, 1.0, 1.0, 0.0;
  } else {
    std::string valid;
    for (const auto& n : case_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown case '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return c;
}

/// J uniform draws from the case domain labelled with noiseless f_l.
inline Dataset generate_lf_dataset(const ObjectiveCase& c, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("generate_lf_dataset: count must be >= 1");
  Rng rng(seed);
  Dataset data(c.dim);
  for (int j = 0; j < count; ++j) {
    const Point x = sample_uniform(c.domain, rng);
    data.push_back(x, c.lf(x));
  }
  return data;
}

/// Running simple regret S_t = min_{i<=t} (f* - f(x_i)) from noiseless
/// objective values.
inline std::vector<double> simple_regret(std::span<const double> f_values, double f_star) {
  std::vector<double> regret;
  regret.reserve(f_values.size());
  double best = std::numeric_limits<double>::infinity();
  for (double f : f_values) {
    best = std::min(best, f_star - f);
    regret.push_back(best);
  }
  return regret;
}

}  // namespace abo
