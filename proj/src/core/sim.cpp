#include "lbkan/sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

constexpr double kTimeSlack = 1e-9;

struct Derivative {
  Eigen::Vector4d x_dot;
  Eigen::VectorXd theta_dot;
};

struct Scratch {
  Eigen::VectorXd phi;
  Eigen::MatrixXd jac;
};

// Euler steps taken at the outer boundary move tangentially and can leave the
// ball by O(dt^2); pull the estimate back onto the sphere.
void retract(Eigen::VectorXd& theta, const ControllerConfig& ctrl) {
  const double norm = theta.norm();
  const double outer = ctrl.outer_radius();
  if (norm > outer) theta *= outer / norm;
}

Derivative closed_loop(double t, const Eigen::Vector4d& x,
                       const Eigen::VectorXd& theta, const PlantSpec& plant,
                       const ControllerConfig& ctrl, Approximator& approx,
                       Scratch& s, StepRecord* record) {
  const DesiredState ref = desired(plant.trajectory, t);
  const Eigen::Vector4d e = x - ref.x_d;
  approx.evaluate({x.data(), 4}, as_span(theta), s.phi, s.jac);
  const Eigen::VectorXd u = control_input(s.phi, e, ref.xd_dot, ctrl);
  const Eigen::Vector4d f = drift(x);
  Derivative d;
  d.x_dot = f + u + disturbance(plant, t);
  d.theta_dot = project(theta, update_direction(s.jac, e, ctrl), ctrl);
  if (record != nullptr) {
    record->t = t;
    record->x = x;
    record->e = e;
    record->phi = s.phi;
    record->f_err = f - s.phi;
    record->u = u;
    record->theta_norm = theta.norm();
  }
  return d;
}

void check_state(const SimState& s, const SimConfig& cfg) {
  const bool finite = s.x.allFinite() && s.theta.allFinite();
  if (!finite || s.x.norm() > cfg.divergence_bound) {
    throw SimulationDiverged(
        s.index, "simulation diverged at step " + std::to_string(s.index) +
                     (finite ? " (|x| exceeded bound)" : " (non-finite state)"));
  }
}

// Running trapezoid sums on the uniform time grid.
class SummaryAccumulator {
 public:
  explicit SummaryAccumulator(const SimConfig& cfg) : cfg_(cfg) {}

  void add(const StepRecord& r) {
    ++records_;
    max_theta_ = std::max(max_theta_, r.theta_norm);
    const double f_err = r.f_err.norm();
    if (r.t <= cfg_.cost_horizon + kTimeSlack) {
      cost_.add(r.t, f_err * f_err);
    }
    if (r.t >= cfg_.skip_transient - kTimeSlack) {
      const double e = r.e.norm();
      e_avg_.add(r.t, e);
      f_avg_.add(r.t, f_err);
      max_e_after_ = std::max(max_e_after_, e);
    }
  }

  RunSummary finish() const {
    RunSummary s;
    s.records = records_;
    s.mean_e_norm = e_avg_.mean();
    s.mean_f_err_norm = f_avg_.mean();
    s.cost = cost_.integral();
    s.max_theta_norm = max_theta_;
    s.max_e_norm_after_transient = max_e_after_;
    s.seed = cfg_.seed;
    s.skip_transient = cfg_.skip_transient;
    s.x0 = cfg_.x0;
    return s;
  }

 private:
  struct Trapezoid {
    double sum = 0.0;
    double first = 0.0;
    double last = 0.0;
    double t_first = 0.0;
    double t_last = 0.0;
    std::size_t count = 0;

    void add(double t, double v) {
      if (count == 0) {
        first = v;
        t_first = t;
      }
      sum += v;
      last = v;
      t_last = t;
      ++count;
    }
    double integral() const {
      if (count < 2) return 0.0;
      const double h = (t_last - t_first) / static_cast<double>(count - 1);
      return h * (sum - 0.5 * (first + last));
    }
    double mean() const {
      if (count == 0) return 0.0;
      if (count == 1) return first;
      return integral() / (t_last - t_first);
    }
  };

  const SimConfig& cfg_;
  std::size_t records_ = 0;
  double max_theta_ = 0.0;
  double max_e_after_ = 0.0;
  Trapezoid cost_;
  Trapezoid e_avg_;
  Trapezoid f_avg_;
};

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("sim: dt must be > 0");
  if (!(t_final >= dt) || !std::isfinite(t_final)) {
    throw InvalidArgument("sim: t_final must be >= dt");
  }
  if (!x0.allFinite()) throw InvalidArgument("sim: x0 must be finite");
  if (!theta0.allFinite()) throw InvalidArgument("sim: theta0 must be finite");
  if (!(skip_transient >= 0.0)) throw InvalidArgument("sim: skip_transient must be >= 0");
  if (skip_transient > t_final) {
    throw InvalidArgument("sim: skip_transient must not exceed t_final");
  }
}

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
}

StepRecord observe(const SimState& state, const SimConfig& cfg,
                   const PlantSpec& plant, const ControllerConfig& ctrl,
                   Approximator& approx) {
  Scratch s;
  StepRecord record;
  closed_loop(static_cast<double>(state.index) * cfg.dt, state.x, state.theta,
              plant, ctrl, approx, s, &record);
  return record;
}

StepResult step(const SimState& state, const SimConfig& cfg,
                const PlantSpec& plant, const ControllerConfig& ctrl,
                Approximator& approx) {
  const double t = static_cast<double>(state.index) * cfg.dt;
  const double dt = cfg.dt;
  Scratch s;
  StepResult out;
  out.next.index = state.index + 1;

  const Derivative k1 =
      closed_loop(t, state.x, state.theta, plant, ctrl, approx, s, &out.record);
  if (cfg.integrator == Integrator::Euler) {
    out.next.x = state.x + dt * k1.x_dot;
    out.next.theta = state.theta + dt * k1.theta_dot;
  } else {
    auto stage = [&](double h, const Derivative& k) {
      Eigen::VectorXd theta = state.theta + h * k.theta_dot;
      retract(theta, ctrl);
      return closed_loop(t + h, state.x + h * k.x_dot, theta, plant, ctrl,
                         approx, s, nullptr);
    };
    const Derivative k2 = stage(0.5 * dt, k1);
    const Derivative k3 = stage(0.5 * dt, k2);
    const Derivative k4 = stage(dt, k3);
    out.next.x = state.x + (dt / 6.0) * (k1.x_dot + 2.0 * k2.x_dot +
                                          2.0 * k3.x_dot + k4.x_dot);
    out.next.theta =
        state.theta + (dt / 6.0) * (k1.theta_dot + 2.0 * k2.theta_dot +
                                    2.0 * k3.theta_dot + k4.theta_dot);
  }
  retract(out.next.theta, ctrl);
  check_state(out.next, cfg);
  return out;
}

StreamResult run_streaming(const SimConfig& cfg, const PlantSpec& plant,
                           const ControllerConfig& ctrl, Approximator& approx,
                           const RecordSink& sink) {
  cfg.validate();
  ctrl.validate();
  if (static_cast<std::size_t>(cfg.theta0.size()) != approx.param_count()) {
    throw InvalidArgument("sim: theta0 has " + std::to_string(cfg.theta0.size()) +
                          " entries, approximator expects " +
                          std::to_string(approx.param_count()));
  }
  if (approx.dim() != kPlantDim) {
    throw InvalidArgument("sim: approximator dimension must match the plant");
  }
  if (cfg.integrator == Integrator::Rk4 && !ctrl.sgn_smoothing) {
    throw InvalidArgument(
        "sim: rk4 requires sgn smoothing (the signum term is discontinuous)");
  }

  SimState state{cfg.x0, cfg.theta0, 0};
  if (state.theta.norm() > ctrl.outer_radius()) {
    throw ContractViolation("sim: initial weights lie outside the projection ball");
  }
  SummaryAccumulator acc(cfg);
  const std::size_t steps = cfg.step_count();
  for (std::size_t i = 0; i < steps; ++i) {
    StepResult r = step(state, cfg, plant, ctrl, approx);
    acc.add(r.record);
    if (sink) sink(r.record);
    state = std::move(r.next);
  }
  const StepRecord last = observe(state, cfg, plant, ctrl, approx);
  acc.add(last);
  if (sink) sink(last);

  StreamResult result{acc.finish(), std::move(state.theta)};
  result.summary.trajectory = plant.trajectory;
  return result;
}

RunLog run(const SimConfig& cfg, const PlantSpec& plant,
           const ControllerConfig& ctrl, Approximator& approx) {
  RunLog log;
  log.records.reserve(cfg.step_count() + 1);
  StreamResult r = run_streaming(cfg, plant, ctrl, approx, [&](const StepRecord& rec) {
    log.records.push_back(rec);
  });
  log.summary = r.summary;
  log.final_theta = std::move(r.final_theta);
  return log;
}

void write_csv_header(std::ostream& os) {
  os << "t,x1,x2,x3,x4,e_norm,f_err_norm,u_norm,theta_norm\n";
}

void write_csv_row(std::ostream& os, const StepRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                r.x[0], r.x[1], r.x[2], r.x[3], r.e.norm(), r.f_err.norm(),
                r.u.norm(), r.theta_norm);
  os << buf;
}

}  // namespace lbkan
