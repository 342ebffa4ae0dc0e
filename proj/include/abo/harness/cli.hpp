#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abo/harness/experiment.hpp"
#include "abo/harness/io.hpp"
#include "abo/harness/posterior_dump.hpp"

namespace abo::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kOutputDirEnv = "ABO_OUTPUT_DIR";

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "abo_results";
}

namespace detail {

struct RunFlags {
  std::string config;
  std::optional<std::string> case_name, algs, out, currin;
  std::optional<int> runs, budget, n_init, lf_size, threads, restarts, evals_per_lambda;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_sd, sqrt_beta, w_lf, alpha, zeta;
  bool log_growth = false;
  bool freeze_weight = false;
};

inline json flags_overlay(const RunFlags& f) {
  json j = json::object();
  if (f.case_name) j["case"] = *f.case_name;
  if (f.algs) j["algorithms"] = split_list(*f.algs);
  if (f.runs) j["runs"] = *f.runs;
  if (f.seed) j["seed"] = *f.seed;
  if (f.budget) j["budget"] = *f.budget;
  if (f.n_init) j["n_init"] = *f.n_init;
  if (f.lf_size) j["lf_size"] = *f.lf_size;
  if (f.threads) j["threads"] = *f.threads;
  if (f.out) j["output"] = *f.out;
  if (f.noise_sd) j["noise_sd"] = *f.noise_sd;
  if (f.currin) j["currin_lf"] = *f.currin;
  if (f.restarts) j["fit_restarts"] = *f.restarts;
  if (f.evals_per_lambda) j["acq_evals_per_lambda"] = *f.evals_per_lambda;
  if (f.log_growth) j["beta"] = {{"kind", "log_growth"}};
  if (f.sqrt_beta) j["beta"] = {{"kind", "constant"}, {"sqrt_beta", *f.sqrt_beta}};
  json abo = json::object();
  if (f.w_lf) abo["w_lf"] = *f.w_lf;
  if (f.alpha) abo["alpha"] = *f.alpha;
  if (f.freeze_weight) abo["adapt_weight"] = false;
  if (!abo.empty()) j["abo"] = abo;
  if (f.zeta) j["mfbo2"] = {{"zeta", *f.zeta}};
  return j;
}

inline int cmd_run(const RunFlags& flags, std::ostream& out) {
  ExperimentSpec spec;
  if (!flags.config.empty()) apply_config(read_json_file(flags.config), spec);
  apply_config(flags_overlay(flags), spec);
  if (spec.output_dir.empty()) spec.output_dir = default_output_dir();

  const auto result = run_experiment(spec);
  write_outputs(result, spec.output_dir);
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  for (const auto& ar : result.per_algorithm) {
    const auto& s = ar.stats;
    out << to_string(ar.algorithm) << ": n=" << s.n_effective;
    if (!s.mean_regret.empty()) {
      out << " final mean regret " << format_double(s.mean_regret.back()) << " (sd "
          << format_double(s.sd_regret.back()) << ")";
    }
    if (!s.mean_hf_weight.empty()) out << " final mean HF weight " << format_double(s.mean_hf_weight.back());
    out << '\n';
  }
  out << "outputs written to " << spec.output_dir << '\n';
  for (const auto& ar : result.per_algorithm) {
    if (ar.stats.n_effective == 0) return kExitRuntime;
  }
  return kExitOk;
}

struct DemoFlags {
  std::string case_name = "case1";
  int hf = 3;
  int lf = 3;
  std::uint64_t seed = 1;
  int grid = 1001;
  double w_lf = 0.5;
  double sqrt_beta = 2.0;
  std::string out;
};

inline int cmd_demo(const DemoFlags& f, std::ostream& out, std::ostream& err) {
  ObjectiveCase c;
  try {
    c = make_case(f.case_name);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (c.dim != 1) {
    err << "error: demo needs a 1D case (" << c.name << " has dimension " << c.dim << ")\n";
    return kExitUsage;
  }
  if (f.hf < 1 || f.lf < 1 || f.grid < 2 || !(f.w_lf >= 0.0 && f.w_lf < 1.0)) {
    err << "error: need --hf >= 1, --lf >= 1, --grid >= 2 and 0 <= --w-lf < 1\n";
    return kExitUsage;
  }
  Rng rng(derive_seed(f.seed, "design"));
  Dataset hf_points(c.dim);
  for (int i = 0; i < f.hf; ++i) {
    const Point x = sample_uniform(c.domain, rng);
    hf_points.push_back(x, c.hf(x));
  }
  const Dataset lf_points = generate_lf_dataset(c, f.lf, lf_data_seed(f.seed));
  FitSettings fit;
  fit.seed = derive_seed(f.seed, "fit");
  const auto dump = posterior_dump(c, hf_points, lf_points, f.grid, f.w_lf, f.sqrt_beta, fit);
  if (f.out.empty()) {
    write_posterior_csv(dump, out);
  } else {
    std::ostringstream s;
    write_posterior_csv(dump, s);
    write_text(f.out, s.str());
  }
  return kExitOk;
}

inline int cmd_list_cases(std::ostream& out) {
  for (const auto& name : case_names()) {
    const auto c = make_case(name);
    out << name << "  dim=" << c.dim << "  domain=";
    for (int i = 0; i < c.dim; ++i) {
      out << (i ? "x" : "") << '[' << format_double(c.domain.lower()[i]) << ','
          << format_double(c.domain.upper()[i]) << ']';
    }
    out << "  f_star=" << format_double(c.f_star) << '\n';
  }
  return kExitOk;
}

inline int cmd_regret(const std::string& dir, const std::string& out_dir, std::ostream& out) {
  const auto stats = recompute_stats(dir);
  const fs::path target = out_dir.empty() ? fs::path(dir) : fs::path(out_dir);
  for (const auto& s : stats) {
    write_text(stats_path(target, s.algorithm), stats_csv(s));
    out << s.algorithm << ": n=" << s.n_effective << " -> " << stats_path(target, s.algorithm).string() << '\n';
  }
  return kExitOk;
}

inline int cmd_compare(const std::string& dir, const std::string& a, const std::string& b, double level,
                       std::ostream& out) {
  const json manifest = read_json_file(fs::path(dir) / "manifest.json");
  ExperimentSpec spec;
  apply_config(manifest, spec);
  const ObjectiveCase c = make_case(spec.case_name, spec.case_options());
  const Algorithm alg_a = parse_algorithm(a);
  const Algorithm alg_b = parse_algorithm(b);
  std::vector<double> diffs;
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < spec.n_runs; ++i) {
    const auto pa = record_path(dir, to_string(alg_a), spec.run_seed(i));
    const auto pb = record_path(dir, to_string(alg_b), spec.run_seed(i));
    if (!fs::exists(pa) || !fs::exists(pb)) continue;
    const double ra = simple_regret(record_from_json(read_json_file(pa)), c).back();
    const double rb = simple_regret(record_from_json(read_json_file(pb)), c).back();
    diffs.push_back(ra - rb);
    sum_a += ra;
    sum_b += rb;
  }
  if (diffs.empty()) throw std::runtime_error("compare: no paired records found in " + dir);
  const auto test = sign_test(diffs);
  const double n = static_cast<double>(diffs.size());
  const json report = {{"a", a},
                       {"b", b},
                       {"pairs", diffs.size()},
                       {"mean_final_regret_a", sum_a / n},
                       {"mean_final_regret_b", sum_b / n},
                       {"a_better", test.n_negative},
                       {"b_better", test.n_positive},
                       {"ties", test.n_ties},
                       {"p_value", test.p_value},
                       {"level", level},
                       {"rejects_equality", test.rejects(level)}};
  out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Multi-fidelity Bayesian optimization benchmarks"};
  app.require_subcommand(1);

  detail::RunFlags rf;
  auto* run = app.add_subcommand("run", "run a seeded Monte-Carlo experiment");
  run->add_option("--config", rf.config, "JSON config file (a manifest.json works too)");
  run->add_option("--case", rf.case_name, "case1..case4");
  run->add_option("--algs", rf.algs, "comma list of gp_ucb,abo,mfbo1,mfbo2");
  run->add_option("--runs", rf.runs);
  run->add_option("--seed", rf.seed, "master seed; run i uses seed + i");
  run->add_option("--budget", rf.budget, "HF evaluations per run, initial design included");
  run->add_option("--n-init", rf.n_init);
  run->add_option("--lf-size", rf.lf_size);
  run->add_option("--threads", rf.threads);
  run->add_option("--out", rf.out, std::string("output directory (default $") + kOutputDirEnv + " or ./abo_results)");
  run->add_option("--noise-sd", rf.noise_sd);
  run->add_option("--currin-lf", rf.currin, "shifted|standard");
  run->add_option("--fit-restarts", rf.restarts);
  run->add_option("--acq-evals-per-lambda", rf.evals_per_lambda);
  run->add_option("--sqrt-beta", rf.sqrt_beta);
  run->add_flag("--beta-log-growth", rf.log_growth);
  run->add_option("--w-lf", rf.w_lf, "initial LF weight for abo");
  run->add_option("--alpha", rf.alpha, "forgetting factor for abo");
  run->add_flag("--freeze-weight", rf.freeze_weight, "disable the abo weight update");
  run->add_option("--zeta", rf.zeta, "mfbo2 bias bound");

  detail::DemoFlags df;
  auto* demo = app.add_subcommand("demo", "dump HF/LF/regularized posteriors on a grid (1D cases)");
  demo->add_option("--case", df.case_name);
  demo->add_option("--hf", df.hf, "number of HF points");
  demo->add_option("--lf", df.lf, "number of LF points");
  demo->add_option("--seed", df.seed);
  demo->add_option("--grid", df.grid);
  demo->add_option("--w-lf", df.w_lf);
  demo->add_option("--sqrt-beta", df.sqrt_beta);
  demo->add_option("--out", df.out, "CSV path (default stdout)");

  auto* list = app.add_subcommand("list-cases", "list benchmark cases");

  std::string regret_dir, regret_out;
  auto* regret = app.add_subcommand("regret", "recompute statistics from stored run records");
  regret->add_option("--dir", regret_dir)->required();
  regret->add_option("--out", regret_out, "directory for the CSVs (default --dir)");

  std::string cmp_dir, cmp_a = "abo", cmp_b = "gp_ucb";
  double cmp_level = 0.05;
  auto* compare = app.add_subcommand("compare", "paired sign test on final simple regret");
  compare->add_option("--dir", cmp_dir)->required();
  compare->add_option("--a", cmp_a);
  compare->add_option("--b", cmp_b);
  compare->add_option("--level", cmp_level);

  std::vector<std::string> storage{"abo-bench"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*run) return detail::cmd_run(rf, out);
    if (*demo) return detail::cmd_demo(df, out, err);
    if (*list) return detail::cmd_list_cases(out);
    if (*regret) return detail::cmd_regret(regret_dir, regret_out, out);
    if (*compare) return detail::cmd_compare(cmp_dir, cmp_a, cmp_b, cmp_level, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace abo::harness
