#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lbkan/approximator.hpp"
#include "lbkan/control.hpp"
#include "lbkan/plant.hpp"

namespace lbkan {

enum class Integrator { Euler, Rk4 };

struct SimConfig {
  double dt = 0.001;
  double t_final = 100.0;
  Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
  Eigen::VectorXd theta0;
  std::uint64_t seed = 0;  // recorded in the summary only
  Integrator integrator = Integrator::Euler;
  // Summary averages cover t >= skip_transient.
  double skip_transient = 0.0;
  // The cost integral covers t <= cost_horizon.
  double cost_horizon = std::numeric_limits<double>::infinity();
  double divergence_bound = 1e6;

  void validate() const;
  // floor(t_final / dt) steps, robust to round-off in the ratio.
  std::size_t step_count() const;
};

struct SimState {
  Eigen::Vector4d x;
  Eigen::VectorXd theta;
  std::size_t index = 0;  // t = index * dt
};

// Quantities observed at one grid time, before the step is taken.
struct StepRecord {
  double t = 0.0;
  Eigen::Vector4d x;
  Eigen::Vector4d e;
  Eigen::Vector4d phi;
  Eigen::Vector4d f_err;  // f(x) - phi
  Eigen::Vector4d u;
  double theta_norm = 0.0;
};

struct RunSummary {
  std::size_t records = 0;
  double mean_e_norm = 0.0;      // time average of |e| over [skip_transient, t_final]
  double mean_f_err_norm = 0.0;  // time average of |f - phi|
  double cost = 0.0;             // trapezoid of |f - phi|^2 over [0, cost_horizon]
  double max_theta_norm = 0.0;
  double max_e_norm_after_transient = 0.0;
  Trajectory trajectory;
  Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
  std::uint64_t seed = 0;
  double skip_transient = 0.0;
};

struct RunLog {
  std::vector<StepRecord> records;
  RunSummary summary;
  Eigen::VectorXd final_theta;
};

struct StepResult {
  StepRecord record;
  SimState next;
};

// Evaluates e, phi, J and u at `state` without advancing it.
StepRecord observe(const SimState& state, const SimConfig& cfg,
                   const PlantSpec& plant, const ControllerConfig& ctrl,
                   Approximator& approx);

// One integration step. Euler evaluates phi and J once at the pre-step
// (x, theta) and advances x and theta together. Throws SimulationDiverged
// when the new state is non-finite or exceeds the divergence bound.
StepResult step(const SimState& state, const SimConfig& cfg,
                const PlantSpec& plant, const ControllerConfig& ctrl,
                Approximator& approx);

using RecordSink = std::function<void(const StepRecord&)>;

struct StreamResult {
  RunSummary summary;
  Eigen::VectorXd final_theta;
};

// Runs to t_final, passing every record (floor(t_final/dt) + 1 of them) to
// `sink`, which may be empty.
StreamResult run_streaming(const SimConfig& cfg, const PlantSpec& plant,
                           const ControllerConfig& ctrl, Approximator& approx,
                           const RecordSink& sink);

RunLog run(const SimConfig& cfg, const PlantSpec& plant,
           const ControllerConfig& ctrl, Approximator& approx);

// CSV columns t,x1..x4,e_norm,f_err_norm,u_norm,theta_norm at 17 significant
// digits.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const StepRecord& r);

}  // namespace lbkan
