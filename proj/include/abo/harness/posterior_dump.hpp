#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abo/acquisition.hpp"
#include "abo/benchmarks.hpp"
#include "abo/fusion.hpp"
#include "abo/gp.hpp"
#include "abo/harness/csv.hpp"
#include "abo/optimizers.hpp"

namespace abo::harness {

struct PosteriorRow {
  double x, f, f_lf;
  double hf_mean, hf_sd;
  double lf_mean, lf_sd;
  double reg_mean, reg_sd;
  double ucb_plain, ucb_reg;
};

struct PosteriorDump {
  std::vector<PosteriorRow> rows;
  GpHyperparams hf_hyper;
  GpHyperparams lf_hyper;
};

inline constexpr const char* kPosteriorColumns =
    "x,f,f_lf,hf_mean,hf_sd,lf_mean,lf_sd,reg_mean,reg_sd,ucb_plain,ucb_reg";

/// HF and LF GP posteriors, their weighted fusion and both UCB curves on a
/// uniform grid over a 1D case domain (endpoints included).
inline PosteriorDump posterior_dump(const ObjectiveCase& c, const Dataset& hf_points, const Dataset& lf_points,
                                    int grid, double w_lf, double sqrt_beta = 2.0, FitSettings fit = {}) {
  if (c.dim != 1) throw std::invalid_argument("posterior_dump: only 1D cases can be dumped");
  if (grid < 2) throw std::invalid_argument("posterior_dump: grid must have at least 2 points");
  if (hf_points.empty() || lf_points.empty()) throw std::invalid_argument("posterior_dump: need HF and LF points");
  if (!(w_lf >= 0.0 && w_lf < 1.0)) throw std::invalid_argument("posterior_dump: w_lf must lie in [0, 1)");

  fit.length_reference = c.domain.diagonal();
  FitSettings hf_fit = fit;
  hf_fit.seed = derive_seed(fit.seed, "hf");
  FitSettings lf_fit = fit;
  lf_fit.seed = derive_seed(fit.seed, "lf");

  PosteriorDump dump;
  dump.hf_hyper = fit_hyperparams(hf_points, default_hyperparams(hf_points, fit.length_reference), hf_fit).hyper;
  dump.lf_hyper = fit_hyperparams(lf_points, default_hyperparams(lf_points, fit.length_reference), lf_fit).hyper;
  const GpModel hf(hf_points, dump.hf_hyper);
  const GpModel lf(lf_points, dump.lf_hyper);

  const double lo = c.domain.lower()[0];
  const double hi = c.domain.upper()[0];
  for (int i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? hi : lo + (hi - lo) * i / (grid - 1);
    const Point p = Point::Constant(1, x);
    const GaussianBelief h = hf.predict(p);
    const GaussianBelief l = lf.predict(p);
    const FusedBelief reg = dwpoe_fuse(abo::detail::floored(h), abo::detail::floored(l), w_lf);
    const double reg_sd = w_lf == 0.0 ? h.sd : reg.sd;
    dump.rows.push_back({x, c.hf(p), c.lf(p), h.mean, h.sd, l.mean, l.sd, reg.mean, reg_sd, ucb(h, sqrt_beta),
                         reg.mean + sqrt_beta * reg_sd});
  }
  return dump;
}

inline void write_posterior_csv(const PosteriorDump& dump, std::ostream& out) {
  out << kPosteriorColumns << '\n';
  for (const auto& r : dump.rows) {
    write_csv_row(out, {r.x, r.f, r.f_lf, r.hf_mean, r.hf_sd, r.lf_mean, r.lf_sd, r.reg_mean, r.reg_sd, r.ucb_plain,
                        r.ucb_reg});
  }
}

}  // namespace abo::harness
