#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lbkan/approximator.hpp"
#include "lbkan/control.hpp"
#include "lbkan/plant.hpp"
#include "lbkan/sim.hpp"

namespace lbkan {

// One controller architecture: approximator prototype (cloned per run) plus
// its gains.
struct ArchitectureSetup {
  std::shared_ptr<const Approximator> prototype;
  ControllerConfig ctrl;
  Eigen::VectorXd theta0;  // initial weights for compare()
};

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

struct McConfig {
  std::size_t num_candidates = 100;
  double init_range = 0.1;  // weights ~ U(-init_range, init_range)
  double horizon = 60.0;    // seconds simulated per candidate
  double dt = 0.001;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct McCandidate {
  std::size_t index = 0;
  double cost = 0.0;  // J = int_0^horizon |f - phi|^2 dt
  double max_theta_norm = 0.0;
  bool diverged = false;
  std::string error;
};

struct McResult {
  std::size_t best_index = 0;
  Eigen::VectorXd best_theta;
  std::vector<McCandidate> table;
  Scenario scenario;
};

// Scenario shared by every Monte Carlo candidate of a given seed.
Scenario mc_scenario(std::uint64_t seed);

// Candidate i's initial weights, U(-range, range)^param_count.
Eigen::VectorXd sample_weights(std::uint64_t seed, std::size_t index,
                               std::size_t param_count, double range);

// Simulates every candidate over [0, horizon] on `scenario` and returns the
// argmin of J (ties go to the lowest index). Throws McFailed when every
// candidate diverges.
McResult mc_select(const McConfig& cfg, const ArchitectureSetup& arch,
                   const PlantSpec& plant, const Scenario& scenario,
                   const std::vector<Eigen::VectorXd>& candidates);

// mc_select over num_candidates sampled weight vectors and mc_scenario(seed).
McResult mc_init(const McConfig& cfg, const ArchitectureSetup& arch,
                 const PlantSpec& plant);

struct CompareConfig {
  std::size_t num_runs = 20;
  double t_final = 100.0;
  double dt = 0.001;
  double skip_transient = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // When set, each run's log goes to <run_dir>/<arch>_run<i>.csv, keeping
  // every csv_stride-th record.
  std::filesystem::path run_dir;
  std::size_t csv_stride = 1;

  void validate() const;
};

// Scenario for comparison run i; identical for every architecture.
Scenario compare_scenario(std::uint64_t seed, std::size_t run_index);

struct RunRow {
  std::size_t run_index = 0;
  Scenario scenario;
  double mean_e_norm = 0.0;
  double mean_f_err_norm = 0.0;
  double max_theta_norm = 0.0;
  bool diverged = false;
  std::string error;
};

struct ArchitectureStats {
  std::string name;
  std::vector<RunRow> rows;  // sorted by run index
  std::size_t used_runs = 0;
  std::size_t diverged_runs = 0;
  double mean_e_norm = 0.0;
  double std_e_norm = 0.0;  // unbiased; NaN when fewer than two runs
  double mean_f_err_norm = 0.0;
  double std_f_err_norm = 0.0;
};

struct ComparisonReport {
  std::vector<ArchitectureStats> architectures;
};

struct MeanStd {
  double mean;
  double std;  // unbiased (N - 1); NaN for N < 2
};
MeanStd mean_std(const std::vector<double>& values);

ComparisonReport compare(const std::vector<ArchitectureSetup>& archs,
                         const PlantSpec& plant, const CompareConfig& cfg);

}  // namespace lbkan
