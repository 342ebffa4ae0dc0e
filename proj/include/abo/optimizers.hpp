#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abo/acquisition.hpp"
#include "abo/benchmarks.hpp"
#include "abo/fusion.hpp"
#include "abo/gp.hpp"
#include "abo/random.hpp"

namespace abo {

enum class Algorithm { gp_ucb, abo, mfbo1, mfbo2 };

inline constexpr std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::gp_ucb: return "gp_ucb";
    case Algorithm::abo: return "abo";
    case Algorithm::mfbo1: return "mfbo1";
    case Algorithm::mfbo2: return "mfbo2";
  }
  return "?";
}

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> algs{Algorithm::gp_ucb, Algorithm::abo, Algorithm::mfbo1, Algorithm::mfbo2};
  return algs;
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms()) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (valid: gp_ucb, abo, mfbo1, mfbo2)");
}

inline bool uses_lf_data(Algorithm a) { return a != Algorithm::gp_ucb; }

struct AboSettings {
  double initial_w_lf = 0.5;
  double alpha = 0.9;
  bool adapt_weight = true;
};

struct Mfbo2Settings {
  // Bound on |f - f_l|; unset selects the sample sd of the LF outputs.
  std::optional<double> zeta;
};

struct RunConfig {
  int budget = 20;  // HF evaluations, initial design included
  int n_init = 2;
  BetaSchedule beta{};
  int refit_every = 1;
  std::uint64_t seed = 0;
  FitSettings fit{};
  CmaesSettings acquisition{};
  AboSettings abo{};
  Mfbo2Settings mfbo2{};

  void validate() const {
    if (n_init < 1 || budget < n_init) throw std::invalid_argument("RunConfig: require budget >= n_init >= 1");
    if (refit_every < 1) throw std::invalid_argument("RunConfig: refit_every must be >= 1");
    beta.validate();
    initial_weight(abo.initial_w_lf, abo.alpha);
    if (mfbo2.zeta && !(*mfbo2.zeta >= 0.0)) throw std::invalid_argument("RunConfig: zeta must be >= 0");
  }
};

/// Per-evaluation trace of one optimization run. All vectors have length
/// `budget`; entry i describes the (i+1)-th HF evaluation.
struct RunRecord {
  std::string algorithm;
  std::string case_name;
  std::uint64_t seed = 0;
  std::vector<Point> xs;
  std::vector<double> ys;
  std::vector<double> incumbent;
  std::vector<double> w_lf;  // ABO only: LF weight after each evaluation
  std::vector<double> iteration_seconds;  // 0 for initial-design entries
  int fit_failures = 0;
  std::optional<double> zeta;  // MFBO-II only
};

/// Independent substream seeds derived from the run's master seed.
struct RunStreams {
  std::uint64_t design;
  std::uint64_t acquisition;
  std::uint64_t noise;
  std::uint64_t fit;

  explicit RunStreams(std::uint64_t seed)
      : design(derive_seed(seed, "design")),
        acquisition(derive_seed(seed, "acquisition")),
        noise(derive_seed(seed, "noise")),
        fit(derive_seed(seed, "fit")) {}
};

namespace detail {

// Floor for predictive sds entering fusion or likelihood terms.
inline constexpr double kMinSd = 1e-12;

inline GaussianBelief floored(GaussianBelief b) {
  b.sd = std::max(b.sd, kMinSd);
  return b;
}

inline GpModel fit_lf_model(const Dataset& lf_data, const ObjectiveCase& c, const RunConfig& config,
                            const RunStreams& streams) {
  if (lf_data.empty()) throw std::invalid_argument("low-fidelity dataset must be non-empty");
  if (lf_data.dim() != c.dim) throw std::invalid_argument("low-fidelity dataset dimension mismatch");
  FitSettings fs = config.fit;
  fs.length_reference = c.domain.diagonal();
  fs.seed = derive_seed(streams.fit, "lf");
  const auto fit = fit_hyperparams(lf_data, default_hyperparams(lf_data, fs.length_reference), fs);
  return GpModel(lf_data, fit.hyper);
}

struct GpUcbPolicy {
  static constexpr std::string_view name = "gp_ucb";
  void prepare(const ObjectiveCase&, const RunConfig&, const RunStreams&, std::vector<Point>&) {}
  auto acquisition(const GpModel& hf, double sqrt_beta) const {
    return [&hf, sqrt_beta](const Point& x) { return ucb(hf.predict(x), sqrt_beta); };
  }
  void observe(const GpModel&, const Point&, double, double) {}
  std::optional<double> weight() const { return std::nullopt; }
};

struct AboPolicy {
  static constexpr std::string_view name = "abo";
  const Dataset& lf_data;
  std::optional<GpModel> lf{};
  WeightState state{};
  bool adapt = true;

  void prepare(const ObjectiveCase& c, const RunConfig& config, const RunStreams& streams, std::vector<Point>&) {
    state = initial_weight(config.abo.initial_w_lf, config.abo.alpha);
    adapt = config.abo.adapt_weight;
    lf.emplace(fit_lf_model(lf_data, c, config, streams));
  }

  auto acquisition(const GpModel& hf, double sqrt_beta) const {
    return [this, &hf, sqrt_beta](const Point& x) {
      const GaussianBelief h = hf.predict(x);
      if (state.w_lf == 0.0) return ucb(h, sqrt_beta);
      const FusedBelief fused = dwpoe_fuse(floored(h), floored(lf->predict(x)), state.w_lf);
      return regularized_ucb(fused, sqrt_beta);
    };
  }

  void observe(const GpModel& hf, const Point& x, double y, double best_before) {
    if (!adapt) return;
    state = weight_update(state, y, best_before, floored(lf->predict(x)), floored(hf.predict(x)));
  }

  std::optional<double> weight() const { return state.w_lf; }
};

struct Mfbo1Policy {
  static constexpr std::string_view name = "mfbo1";
  const Dataset& lf_data;

  void prepare(const ObjectiveCase& c, const RunConfig& config, const RunStreams& streams,
               std::vector<Point>& design) {
    const GpModel lf = fit_lf_model(lf_data, c, config, streams);
    const double sqrt_beta = config.beta.at(1, c.dim);
    Rng rng(derive_seed(streams.acquisition, "lf-warm-start"));
    const auto best = maximize([&](const Point& x) { return ucb(lf.predict(x), sqrt_beta); }, c.domain, rng,
                               config.acquisition);
    design.front() = best.argmax;
  }

  auto acquisition(const GpModel& hf, double sqrt_beta) const {
    return [&hf, sqrt_beta](const Point& x) { return ucb(hf.predict(x), sqrt_beta); };
  }
  void observe(const GpModel&, const Point&, double, double) {}
  std::optional<double> weight() const { return std::nullopt; }
};

inline double sample_sd(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

struct Mfbo2Policy {
  static constexpr std::string_view name = "mfbo2";
  const Dataset& lf_data;
  std::optional<GpModel> lf{};
  double zeta = 0.0;

  void prepare(const ObjectiveCase& c, const RunConfig& config, const RunStreams& streams, std::vector<Point>&) {
    lf.emplace(fit_lf_model(lf_data, c, config, streams));
    zeta = config.mfbo2.zeta.value_or(sample_sd(lf_data.outputs));
  }

  auto acquisition(const GpModel& hf, double sqrt_beta) const {
    return [this, &hf, sqrt_beta](const Point& x) {
      const double upper_hf = ucb(hf.predict(x), sqrt_beta);
      const double upper_lf = ucb(lf->predict(x), sqrt_beta) + zeta;
      return std::min(upper_hf, upper_lf);
    };
  }
  void observe(const GpModel&, const Point&, double, double) {}
  std::optional<double> weight() const { return std::nullopt; }
};

template <typename Policy>
RunRecord run_loop(const ObjectiveCase& c, const RunConfig& config, Policy& policy) {
  using clock = std::chrono::steady_clock;
  config.validate();
  const RunStreams streams(config.seed);

  RunRecord rec;
  rec.algorithm = std::string(Policy::name);
  rec.case_name = c.name;
  rec.seed = config.seed;

  Rng design_rng(streams.design);
  std::vector<Point> design;
  for (int i = 0; i < config.n_init; ++i) design.push_back(sample_uniform(c.domain, design_rng));
  policy.prepare(c, config, streams, design);

  Rng noise_rng(streams.noise);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto observe = [&](const Point& x) {
    double y = c.hf(x);
    if (c.noise_sd > 0.0) y += c.noise_sd * gauss(noise_rng);
    return y;
  };

  Dataset data(c.dim);
  double best = -std::numeric_limits<double>::infinity();
  auto append = [&](const Point& x, double y, double seconds) {
    data.push_back(x, y);
    best = std::max(best, y);
    rec.xs.push_back(x);
    rec.ys.push_back(y);
    rec.incumbent.push_back(best);
    rec.iteration_seconds.push_back(seconds);
    if (auto w = policy.weight()) rec.w_lf.push_back(*w);
  };
  for (const auto& x : design) append(x, observe(x), 0.0);

  const double length_reference = c.domain.diagonal();
  GpHyperparams hyper = default_hyperparams(data, length_reference);
  std::optional<GpHyperparams> last_good;

  for (int t = config.n_init; t < config.budget; ++t) {
    const auto start = clock::now();

    if ((t - config.n_init) % config.refit_every == 0) {
      FitSettings fs = config.fit;
      fs.length_reference = length_reference;
      fs.seed = derive_seed(streams.fit, "hf", static_cast<std::uint64_t>(t));
      const auto fit = fit_hyperparams(data, last_good.value_or(hyper), fs);
      if (fit.warning) ++rec.fit_failures;
      hyper = fit.hyper;
    }

    std::optional<GpModel> model;
    try {
      model.emplace(data, hyper);
      last_good = hyper;
    } catch (const NumericalError&) {
      ++rec.fit_failures;
      if (!last_good) throw;
      hyper = *last_good;
      model.emplace(data, hyper);
    }

    const double sqrt_beta = config.beta.at(t, c.dim);
    Rng acq_rng(derive_seed(streams.acquisition, "iteration", static_cast<std::uint64_t>(t)));
    const auto next = maximize(policy.acquisition(*model, sqrt_beta), c.domain, acq_rng, config.acquisition);

    const double y = observe(next.argmax);
    policy.observe(*model, next.argmax, y, best);
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();
    append(next.argmax, y, seconds);
  }
  return rec;
}

}  // namespace detail

/// GP-UCB: refit the GP each iteration and query the UCB maximizer.
inline RunRecord run_gp_ucb(const ObjectiveCase& c, const RunConfig& config) {
  detail::GpUcbPolicy policy;
  return detail::run_loop(c, config, policy);
}

/// GP-UCB on the HF posterior regularized by a fixed LF GP through the
/// weighted product of experts, with Bayesian adaptation of the LF weight.
inline RunRecord run_abo(const ObjectiveCase& c, const Dataset& lf_data, const RunConfig& config) {
  detail::AboPolicy policy{lf_data};
  return detail::run_loop(c, config, policy);
}

/// GP-UCB whose first design point is the LF-GP UCB maximizer.
inline RunRecord run_mfbo1(const ObjectiveCase& c, const Dataset& lf_data, const RunConfig& config) {
  detail::Mfbo1Policy policy{lf_data};
  return detail::run_loop(c, config, policy);
}

/// HF-only queries on min(UCB_hf, UCB_lf + zeta).
inline RunRecord run_mfbo2(const ObjectiveCase& c, const Dataset& lf_data, const RunConfig& config) {
  detail::Mfbo2Policy policy{lf_data};
  auto rec = detail::run_loop(c, config, policy);
  rec.zeta = policy.zeta;
  return rec;
}

inline RunRecord run_algorithm(Algorithm a, const ObjectiveCase& c, const Dataset& lf_data, const RunConfig& config) {
  switch (a) {
    case Algorithm::gp_ucb: return run_gp_ucb(c, config);
    case Algorithm::abo: return run_abo(c, lf_data, config);
    case Algorithm::mfbo1: return run_mfbo1(c, lf_data, config);
    case Algorithm::mfbo2: return run_mfbo2(c, lf_data, config);
  }
  throw std::invalid_argument("run_algorithm: unknown algorithm");
}

/// Simple regret of a run, re-evaluating the noiseless objective at every
/// queried point.
inline std::vector<double> simple_regret(const RunRecord& rec, const ObjectiveCase& c) {
  if (rec.xs.empty()) throw std::invalid_argument("simple_regret: empty record");
  std::vector<double> f;
  f.reserve(rec.xs.size());
  for (const auto& x : rec.xs) f.push_back(c.hf(x));
  return simple_regret(f, c.f_star);
}

}  // namespace abo
