#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lbkan/control.hpp"
#include "lbkan/sim.hpp"

namespace lbkan {

enum class ApproximatorKind { Kan, Dnn };

// Every tunable of the command-line tool. Defaults reproduce the benchmark
// setup (4-state plant, KAN [4,6,4,4] with G=5, k=3, k_e=11, k_s=0.01,
// gamma=4.2, theta_bar=5, 1 ms Euler steps for 100 s).
struct RunConfig {
  ApproximatorKind approximator = ApproximatorKind::Kan;
  double dt = 0.001;
  double t_final = 100.0;
  std::uint64_t seed = 1;
  Integrator integrator = Integrator::Euler;

  std::vector<int> kan_shape{4, 6, 4, 4};
  int grid_size = 5;
  int spline_order = 3;
  double grid_lo = -10.0;
  double grid_hi = 10.0;
  std::vector<int> dnn_widths{4, 5, 5, 5, 4};

  ControllerConfig ctrl;    // gamma here is the KAN gain
  double gamma_dnn = 6.0;

  std::optional<Eigen::Vector4d> x0;
  std::optional<double> traj_a;
  std::optional<double> traj_b;
  std::optional<double> traj_c;

  std::string theta0_file;
  std::string theta0_dnn_file;
  double init_range = 0.1;
  std::size_t mc_candidates = 100;
  bool full = false;  // restores the full 1000-candidate Monte Carlo
  double mc_horizon = 60.0;

  std::size_t runs = 20;
  double skip_transient = 0.0;
  std::size_t csv_stride = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::size_t decompose_points = 512;
  std::string out_dir = "out";

  // Sets one key from its textual value. Dashes in the key are read as
  // underscores. Throws UsageError naming the key on unknown keys, malformed
  // values, or out-of-range values.
  void set(const std::string& key, const std::string& value);

  // Applies a key=value file: '#' starts a comment, blank lines are skipped.
  // Throws UsageError (bad key/value) or IoError (unreadable file).
  void load_file(const std::filesystem::path& path);

  // Cross-field checks for a subcommand ("run", "mc-init", "compare",
  // "decompose"). Throws UsageError.
  void validate_for(const std::string& command) const;

  // Fully resolved configuration as a JSON object string.
  std::string to_json() const;

  std::size_t effective_candidates() const { return full ? 1000 : mc_candidates; }
  unsigned effective_threads() const;

  static const std::vector<std::string>& keys();
};

}  // namespace lbkan
