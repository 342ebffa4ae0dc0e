#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "abo/harness/csv.hpp"
#include "abo/harness/experiment.hpp"

#ifndef ABO_GIT_DESCRIBE
#define ABO_GIT_DESCRIBE "unknown"
#endif

namespace abo::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kRunRecordSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kStatsColumns =
    "hf_evaluations,mean_regret,sd_regret,band_lower,band_upper,mean_hf_weight,sd_hf_weight,n_runs";

/// Thrown for malformed configuration; the CLI maps it to a usage error.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const fs::path& path)
      : std::runtime_error(what + ": " + path.string()), path_(path) {}
  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

// ---- configuration --------------------------------------------------------

inline json beta_to_json(const BetaSchedule& b) {
  if (b.kind == BetaSchedule::Kind::constant) return {{"kind", "constant"}, {"sqrt_beta", b.sqrt_beta}};
  return {{"kind", "log_growth"}, {"delta", b.delta}};
}

inline json spec_to_json(const ExperimentSpec& s) {
  json algs = json::array();
  for (auto a : s.algorithms) algs.push_back(std::string(to_string(a)));
  return {
      {"case", s.case_name},
      {"algorithms", algs},
      {"runs", s.n_runs},
      {"seed", s.master_seed},
      {"budget", s.run.budget},
      {"n_init", s.run.n_init},
      {"lf_size", s.lf_size},
      {"noise_sd", s.noise_sd},
      {"currin_lf", s.currin == CurrinVariant::shifted ? "shifted" : "standard"},
      {"threads", s.threads},
      {"output", s.output_dir},
      {"beta", beta_to_json(s.run.beta)},
      {"refit_every", s.run.refit_every},
      {"fit_restarts", s.run.fit.restarts},
      {"acq_evals_per_lambda", s.run.acquisition.evaluations_per_lambda},
      {"abo", {{"w_lf", s.run.abo.initial_w_lf}, {"alpha", s.run.abo.alpha}, {"adapt_weight", s.run.abo.adapt_weight}}},
      {"mfbo2", {{"zeta", s.run.mfbo2.zeta ? json(*s.run.mfbo2.zeta) : json(nullptr)}}},
  };
}

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Overlays the keys present in `j` onto `s`. A manifest is accepted too:
/// its "config" member is used.
inline void apply_config(const json& input, ExperimentSpec& s) {
  const json& j = input.contains("config") && input.contains("manifest_version") ? input.at("config") : input;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"case", "algorithms", "runs", "seed", "budget", "n_init", "lf_size", "noise_sd", "currin_lf",
                          "threads", "output", "beta", "refit_every", "fit_restarts", "acq_evals_per_lambda", "abo",
                          "mfbo2"},
                         "");
  detail::read_if(j, "case", s.case_name);
  if (j.contains("algorithms")) {
    s.algorithms.clear();
    for (const auto& a : j.at("algorithms")) {
      try {
        s.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  detail::read_if(j, "runs", s.n_runs);
  detail::read_if(j, "seed", s.master_seed);
  detail::read_if(j, "budget", s.run.budget);
  detail::read_if(j, "n_init", s.run.n_init);
  detail::read_if(j, "lf_size", s.lf_size);
  detail::read_if(j, "noise_sd", s.noise_sd);
  if (j.contains("currin_lf")) {
    const auto v = j.at("currin_lf").get<std::string>();
    if (v == "shifted") s.currin = CurrinVariant::shifted;
    else if (v == "standard") s.currin = CurrinVariant::standard;
    else throw ConfigError("currin_lf must be 'shifted' or 'standard'");
  }
  detail::read_if(j, "threads", s.threads);
  detail::read_if(j, "output", s.output_dir);
  if (j.contains("beta")) {
    const json& b = j.at("beta");
    detail::reject_unknown(b, {"kind", "sqrt_beta", "delta"}, "beta.");
    const std::string kind = b.value("kind", std::string("constant"));
    if (kind == "constant") s.run.beta = BetaSchedule::constant(b.value("sqrt_beta", 2.0));
    else if (kind == "log_growth") s.run.beta = BetaSchedule::log_growth(b.value("delta", 0.1));
    else throw ConfigError("beta.kind must be 'constant' or 'log_growth'");
  }
  detail::read_if(j, "refit_every", s.run.refit_every);
  detail::read_if(j, "fit_restarts", s.run.fit.restarts);
  detail::read_if(j, "acq_evals_per_lambda", s.run.acquisition.evaluations_per_lambda);
  if (j.contains("abo")) {
    const json& a = j.at("abo");
    detail::reject_unknown(a, {"w_lf", "alpha", "adapt_weight"}, "abo.");
    detail::read_if(a, "w_lf", s.run.abo.initial_w_lf);
    detail::read_if(a, "alpha", s.run.abo.alpha);
    detail::read_if(a, "adapt_weight", s.run.abo.adapt_weight);
  }
  if (j.contains("mfbo2")) {
    const json& m = j.at("mfbo2");
    detail::reject_unknown(m, {"zeta"}, "mfbo2.");
    if (m.contains("zeta")) {
      if (m.at("zeta").is_null()) s.run.mfbo2.zeta.reset();
      else s.run.mfbo2.zeta = m.at("zeta").get<double>();
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open", path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---- run records ----------------------------------------------------------

inline json record_to_json(const RunRecord& r, const std::vector<double>& regret) {
  json xs = json::array();
  for (const auto& x : r.xs) xs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  json j = {
      {"schema_version", kRunRecordSchemaVersion},
      {"algorithm", r.algorithm},
      {"case", r.case_name},
      {"seed", r.seed},
      {"budget", r.xs.size()},
      {"x", xs},
      {"y", r.ys},
      {"incumbent", r.incumbent},
      {"simple_regret", regret},
      {"iteration_seconds", r.iteration_seconds},
      {"fit_failures", r.fit_failures},
  };
  j["w_lf"] = r.w_lf.empty() ? json(nullptr) : json(r.w_lf);
  j["zeta"] = r.zeta ? json(*r.zeta) : json(nullptr);
  return j;
}

inline RunRecord record_from_json(const json& j) {
  if (j.value("schema_version", 0) != kRunRecordSchemaVersion) {
    throw ConfigError("run record: unsupported schema_version");
  }
  RunRecord r;
  r.algorithm = j.at("algorithm").get<std::string>();
  r.case_name = j.at("case").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& x : j.at("x")) {
    const auto v = x.get<std::vector<double>>();
    r.xs.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  r.ys = j.at("y").get<std::vector<double>>();
  r.incumbent = j.at("incumbent").get<std::vector<double>>();
  r.iteration_seconds = j.at("iteration_seconds").get<std::vector<double>>();
  r.fit_failures = j.at("fit_failures").get<int>();
  if (!j.at("w_lf").is_null()) r.w_lf = j.at("w_lf").get<std::vector<double>>();
  if (!j.at("zeta").is_null()) r.zeta = j.at("zeta").get<double>();
  return r;
}

inline fs::path record_path(const fs::path& dir, std::string_view algorithm, std::uint64_t seed) {
  return dir / "runs" / std::string(algorithm) / ("seed_" + std::to_string(seed) + ".json");
}

inline fs::path stats_path(const fs::path& dir, std::string_view algorithm) {
  return dir / (std::string(algorithm) + "_stats.csv");
}

// ---- writers --------------------------------------------------------------

inline void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory (" + ec.message() + ")", path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed", path);
}

inline void write_stats_csv(const AggregateStats& s, std::ostream& out) {
  out << kStatsColumns << '\n';
  const bool weights = !s.mean_hf_weight.empty();
  for (std::size_t t = 0; t < s.mean_regret.size(); ++t) {
    out << (t + 1) << ',' << format_double(s.mean_regret[t]) << ',' << format_double(s.sd_regret[t]) << ','
        << format_double(s.band_lower(t)) << ',' << format_double(s.band_upper(t)) << ','
        << (weights ? format_double(s.mean_hf_weight[t]) : "") << ','
        << (weights ? format_double(s.sd_hf_weight[t]) : "") << ',' << s.n_effective << '\n';
  }
}

inline std::string stats_csv(const AggregateStats& s) {
  std::ostringstream out;
  write_stats_csv(s, out);
  return out.str();
}

inline json manifest_json(const ExperimentResult& result) {
  json seeds = json::array();
  for (int i = 0; i < result.spec.n_runs; ++i) seeds.push_back(result.spec.run_seed(i));
  json algs = json::object();
  for (const auto& ar : result.per_algorithm) {
    json failed = json::array();
    for (const auto& r : ar.runs) {
      if (!r.ok()) failed.push_back({{"seed", r.seed}, {"error", r.error}});
    }
    const std::string name(to_string(ar.algorithm));
    algs[name] = {{"stats", stats_path("", name).string()},
                  {"n_effective", ar.stats.n_effective},
                  {"failed_runs", failed}};
  }
  return {
      {"manifest_version", kManifestSchemaVersion},
      {"git_describe", ABO_GIT_DESCRIBE},
      {"config", spec_to_json(result.spec)},
      {"seeds", seeds},
      {"lf_data_seeds", [&] {
         json s = json::array();
         for (int i = 0; i < result.spec.n_runs; ++i) s.push_back(lf_data_seed(result.spec.run_seed(i)));
         return s;
       }()},
      {"algorithms", algs},
      {"warnings", result.warnings},
  };
}

/// Per-run JSON records, one stats CSV per algorithm and the manifest.
inline void write_outputs(const ExperimentResult& result, const fs::path& dir) {
  for (const auto& ar : result.per_algorithm) {
    const std::string name(to_string(ar.algorithm));
    for (const auto& r : ar.runs) {
      if (r.ok()) write_text(record_path(dir, name, r.seed), record_to_json(*r.record, r.regret).dump(1) + "\n");
    }
    write_text(stats_path(dir, name), stats_csv(ar.stats));
  }
  write_text(dir / "manifest.json", manifest_json(result).dump(2) + "\n");
}

/// Rebuilds per-algorithm statistics from the records stored under `dir`,
/// re-evaluating the noiseless objective at every stored query.
inline std::vector<AggregateStats> recompute_stats(const fs::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  ExperimentSpec spec;
  apply_config(manifest, spec);
  const ObjectiveCase c = make_case(spec.case_name, spec.case_options());
  std::vector<AggregateStats> out;
  for (auto a : spec.algorithms) {
    std::vector<RunOutcome> runs;
    for (int i = 0; i < spec.n_runs; ++i) {
      RunOutcome o;
      o.seed = spec.run_seed(i);
      const fs::path p = record_path(dir, to_string(a), o.seed);
      if (fs::exists(p)) {
        auto rec = record_from_json(read_json_file(p));
        o.regret = simple_regret(rec, c);
        o.record = std::move(rec);
      } else {
        o.error = "missing record";
      }
      runs.push_back(std::move(o));
    }
    out.push_back(aggregate_runs(a, runs));
  }
  return out;
}

}  // namespace abo::harness
