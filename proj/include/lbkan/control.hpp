#pragma once

#include <Eigen/Dense>

namespace lbkan {

struct ControllerConfig {
  double k_e = 11.0;            // state feedback gain
  double k_s = 0.01;            // sliding-mode gain
  double gamma = 4.2;           // adaptation gain, Gamma = gamma * I
  double theta_bar = 5.0;       // projection radius
  double proj_eps = 0.1;        // boundary layer: outer radius theta_bar (1 + eps)
  bool sgn_smoothing = false;   // replace sgn(e) with tanh(e / delta)
  double sgn_smoothing_delta = 0.01;

  // Throws InvalidArgument when a gain is out of range.
  void validate() const;
  double outer_radius() const noexcept { return theta_bar * (1.0 + proj_eps); }
};

// Componentwise sgn with sgn(0) = 0, or tanh(e / delta) in smoothing mode.
Eigen::VectorXd robust_sign(const Eigen::VectorXd& e, const ControllerConfig& cfg);

// u = -phi_hat - k_e e - k_s sgn(e) + xd_dot.
Eigen::VectorXd control_input(const Eigen::VectorXd& phi_hat,
                              const Eigen::VectorXd& e,
                              const Eigen::VectorXd& xd_dot,
                              const ControllerConfig& cfg);

// Raw adaptation direction gamma * J^T e (no projection).
Eigen::VectorXd update_direction(const Eigen::MatrixXd& jacobian,
                                 const Eigen::VectorXd& e,
                                 const ControllerConfig& cfg);

// Smooth ball projection of the raw direction. Inside the ball of radius
// theta_bar, or when the direction points inward, the direction passes
// unchanged; otherwise its radial component is scaled down by
// c = min(1, (|theta|^2 - theta_bar^2) / (((1+eps)^2 - 1) theta_bar^2)).
// Throws ContractViolation when theta_hat lies outside the outer ball.
Eigen::VectorXd project(const Eigen::VectorXd& theta_hat,
                        const Eigen::VectorXd& raw_dot,
                        const ControllerConfig& cfg);

}  // namespace lbkan
