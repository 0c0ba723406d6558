#include "lbkan/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidArgument(std::string("control: non-finite entry in ") + what);
  }
}

// Slack on the outer-ball check so round-off at the boundary is not flagged.
constexpr double kOuterSlack = 1e-9;

}  // namespace

void ControllerConfig::validate() const {
  if (!(k_e > 0.0)) throw InvalidArgument("control: k_e must be > 0");
  if (!(k_s >= 0.0)) throw InvalidArgument("control: k_s must be >= 0");
  if (!(gamma > 0.0)) throw InvalidArgument("control: gamma must be > 0");
  if (!(theta_bar > 0.0)) throw InvalidArgument("control: theta_bar must be > 0");
  if (!(proj_eps > 0.0)) throw InvalidArgument("control: proj_eps must be > 0");
  if (!(sgn_smoothing_delta > 0.0)) {
    throw InvalidArgument("control: sgn_smoothing_delta must be > 0");
  }
}

Eigen::VectorXd robust_sign(const Eigen::VectorXd& e, const ControllerConfig& cfg) {
  if (cfg.sgn_smoothing) {
    return (e.array() / cfg.sgn_smoothing_delta).tanh().matrix();
  }
  return e.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Eigen::VectorXd control_input(const Eigen::VectorXd& phi_hat,
                              const Eigen::VectorXd& e,
                              const Eigen::VectorXd& xd_dot,
                              const ControllerConfig& cfg) {
  if (phi_hat.size() != e.size() || xd_dot.size() != e.size()) {
    throw InvalidArgument("control: vector lengths differ");
  }
  require_finite(phi_hat, "phi_hat");
  require_finite(e, "e");
  require_finite(xd_dot, "xd_dot");
  return -phi_hat - cfg.k_e * e - cfg.k_s * robust_sign(e, cfg) + xd_dot;
}

Eigen::VectorXd update_direction(const Eigen::MatrixXd& jacobian,
                                 const Eigen::VectorXd& e,
                                 const ControllerConfig& cfg) {
  if (jacobian.rows() != e.size()) {
    throw InvalidArgument("control: jacobian has " +
                          std::to_string(jacobian.rows()) + " rows, error has " +
                          std::to_string(e.size()) + " entries");
  }
  return cfg.gamma * (jacobian.transpose() * e);
}

Eigen::VectorXd project(const Eigen::VectorXd& theta_hat,
                        const Eigen::VectorXd& raw_dot,
                        const ControllerConfig& cfg) {
  if (theta_hat.size() != raw_dot.size()) {
    throw InvalidArgument("control: projection operands differ in length");
  }
  const double norm_sq = theta_hat.squaredNorm();
  const double outer = cfg.outer_radius();
  if (std::sqrt(norm_sq) > outer * (1.0 + kOuterSlack)) {
    throw ContractViolation("control: weight estimate outside the projection ball (|theta| = " +
                            std::to_string(std::sqrt(norm_sq)) + ")");
  }
  const double bar_sq = cfg.theta_bar * cfg.theta_bar;
  const double radial = theta_hat.dot(raw_dot);
  if (norm_sq < bar_sq || radial <= 0.0) return raw_dot;

  const double layer = ((1.0 + cfg.proj_eps) * (1.0 + cfg.proj_eps) - 1.0) * bar_sq;
  const double c = std::min(1.0, (norm_sq - bar_sq) / layer);
  return raw_dot - (c * radial / norm_sq) * theta_hat;
}

}  // namespace lbkan
