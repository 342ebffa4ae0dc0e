#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "abo/benchmarks.hpp"
#include "abo/harness/stats.hpp"
#include "abo/optimizers.hpp"

namespace abo::harness {

struct ExperimentSpec {
  std::string case_name = "case1";
  std::vector<Algorithm> algorithms{Algorithm::gp_ucb, Algorithm::abo};
  int n_runs = 100;
  RunConfig run{};  // run.seed is overwritten per run
  int lf_size = 20;
  std::uint64_t master_seed = 0;
  double noise_sd = 0.0;
  CurrinVariant currin = CurrinVariant::shifted;
  std::string output_dir;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (n_runs < 1) throw std::invalid_argument("ExperimentSpec: runs must be >= 1");
    if (lf_size < 1) throw std::invalid_argument("ExperimentSpec: lf_size must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("ExperimentSpec: no algorithms selected");
    if (threads < 0) throw std::invalid_argument("ExperimentSpec: threads must be >= 0");
    run.validate();
    make_case(case_name, case_options());
  }

  CaseOptions case_options() const { return {noise_sd, currin}; }

  /// Run i of every algorithm uses this seed, so initial designs, noise and
  /// LF data are paired across algorithms.
  std::uint64_t run_seed(int i) const { return master_seed + static_cast<std::uint64_t>(i); }
};

inline std::uint64_t lf_data_seed(std::uint64_t run_seed) { return derive_seed(run_seed, "lf-data"); }

struct RunOutcome {
  std::uint64_t seed = 0;
  std::optional<RunRecord> record;
  std::vector<double> regret;
  std::string error;

  bool ok() const { return record.has_value(); }
};

struct AlgorithmResult {
  Algorithm algorithm;
  std::vector<RunOutcome> runs;
  AggregateStats stats;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<AlgorithmResult> per_algorithm;
  std::vector<std::string> warnings;

  const AlgorithmResult& at(Algorithm a) const {
    for (const auto& r : per_algorithm) {
      if (r.algorithm == a) return r;
    }
    throw std::out_of_range("ExperimentResult: algorithm not part of the experiment");
  }
};

inline AggregateStats aggregate_runs(Algorithm a, const std::vector<RunOutcome>& runs) {
  std::vector<std::vector<double>> regrets;
  std::vector<std::vector<double>> weights;
  int failed = 0;
  for (const auto& r : runs) {
    if (!r.ok()) {
      ++failed;
      continue;
    }
    regrets.push_back(r.regret);
    if (!r.record->w_lf.empty()) weights.push_back(r.record->w_lf);
  }
  auto stats = aggregate(std::string(to_string(a)), regrets, weights);
  stats.n_failed = failed;
  return stats;
}

/// Runs every (algorithm, run index) pair on a worker pool. Results land in
/// fixed slots, so output order never depends on scheduling.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const ObjectiveCase c = make_case(spec.case_name, spec.case_options());

  std::vector<Dataset> lf_sets;
  const bool needs_lf = std::any_of(spec.algorithms.begin(), spec.algorithms.end(), uses_lf_data);
  if (needs_lf) {
    for (int i = 0; i < spec.n_runs; ++i) lf_sets.push_back(generate_lf_dataset(c, spec.lf_size, lf_data_seed(spec.run_seed(i))));
  }

  ExperimentResult result;
  result.spec = spec;
  for (auto a : spec.algorithms) {
    AlgorithmResult ar{a, std::vector<RunOutcome>(static_cast<std::size_t>(spec.n_runs)), {}};
    result.per_algorithm.push_back(std::move(ar));
  }

  const int n_tasks = static_cast<int>(spec.algorithms.size()) * spec.n_runs;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int task = next++; task < n_tasks; task = next++) {
      const int ai = task / spec.n_runs;
      const int run = task % spec.n_runs;
      RunOutcome& out = result.per_algorithm[static_cast<std::size_t>(ai)].runs[static_cast<std::size_t>(run)];
      out.seed = spec.run_seed(run);
      RunConfig cfg = spec.run;
      cfg.seed = out.seed;
      try {
        static const Dataset no_lf;
        const Dataset& lf = needs_lf ? lf_sets[static_cast<std::size_t>(run)] : no_lf;
        auto rec = run_algorithm(spec.algorithms[static_cast<std::size_t>(ai)], c, lf, cfg);
        out.regret = simple_regret(rec, c);
        out.record = std::move(rec);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int n_threads = std::min(n_tasks, spec.threads > 0 ? spec.threads : static_cast<int>(hw));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  for (auto& ar : result.per_algorithm) {
    for (const auto& r : ar.runs) {
      if (!r.ok()) {
        result.warnings.push_back(std::string(to_string(ar.algorithm)) + " run seed " + std::to_string(r.seed) +
                                  " failed: " + r.error);
      }
    }
    ar.stats = aggregate_runs(ar.algorithm, ar.runs);
  }
  return result;
}

/// Paired final-regret comparison: differences are (a - b) per run index.
inline SignTestResult compare_final_regret(const ExperimentResult& result, Algorithm a, Algorithm b) {
  const auto& ra = result.at(a).runs;
  const auto& rb = result.at(b).runs;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < std::min(ra.size(), rb.size()); ++i) {
    if (ra[i].ok() && rb[i].ok()) diffs.push_back(ra[i].regret.back() - rb[i].regret.back());
  }
  return sign_test(diffs);
}

}  // namespace abo::harness
