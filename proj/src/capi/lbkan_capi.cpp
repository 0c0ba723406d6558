#include "lbkan/lbkan.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "lbkan/commands.hpp"
#include "lbkan/config.hpp"
#include "lbkan/control.hpp"
#include "lbkan/errors.hpp"
#include "lbkan/kan.hpp"

struct lbkan_config {
  lbkan::RunConfig cfg;
};

struct lbkan_kan {
  lbkan::KanShape shape;
  lbkan::KanEval eval;
  Eigen::MatrixXd jac;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_key;

lbkan_status fail(lbkan_status status, std::string message, std::string key = {}) {
  g_last_error = std::move(message);
  g_last_key = std::move(key);
  return status;
}

// Maps the core's exception hierarchy onto status codes.
template <typename Fn>
lbkan_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return LBKAN_OK;
  } catch (const lbkan::UsageError& e) {
    return fail(LBKAN_ERR_USAGE, e.what(), e.key());
  } catch (const lbkan::SimulationDiverged& e) {
    return fail(LBKAN_ERR_DIVERGED, e.what());
  } catch (const lbkan::McFailed& e) {
    return fail(LBKAN_ERR_MC_FAILED, e.what());
  } catch (const lbkan::IoError& e) {
    return fail(LBKAN_ERR_IO, e.what());
  } catch (const lbkan::ContractViolation& e) {
    return fail(LBKAN_ERR_CONTRACT, e.what());
  } catch (const lbkan::InvalidArgument& e) {
    return fail(LBKAN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LBKAN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LBKAN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LBKAN_ERR_INTERNAL, "unknown error");
  }
}

lbkan::ControllerConfig to_controller(const lbkan_gains& g) {
  lbkan::ControllerConfig c;
  c.k_e = g.k_e;
  c.k_s = g.k_s;
  c.gamma = g.gamma;
  c.theta_bar = g.theta_bar;
  c.proj_eps = g.proj_eps;
  c.sgn_smoothing = g.sgn_smoothing != 0;
  c.sgn_smoothing_delta = g.sgn_smoothing_delta;
  c.validate();
  return c;
}

void require(bool ok, const char* what) {
  if (!ok) throw lbkan::InvalidArgument(what);
}

void require_kan_call(const lbkan_kan* kan, const double* theta, std::size_t theta_len,
                      const double* x, std::size_t x_len) {
  require(kan != nullptr && theta != nullptr && x != nullptr, "null argument");
  require(theta_len == kan->shape.param_count(), "theta length does not match the network");
  require(x_len == static_cast<std::size_t>(kan->shape.input_dim()),
          "x length does not match the network");
}

}  // namespace

extern "C" {

const char* lbkan_version(void) { return "1.0.0"; }

const char* lbkan_status_name(lbkan_status status) {
  switch (status) {
    case LBKAN_OK: return "ok";
    case LBKAN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case LBKAN_ERR_USAGE: return "usage";
    case LBKAN_ERR_DIVERGED: return "simulation-diverged";
    case LBKAN_ERR_IO: return "io";
    case LBKAN_ERR_CONTRACT: return "contract-violation";
    case LBKAN_ERR_MC_FAILED: return "mc-failed";
    case LBKAN_ERR_BUFFER_TOO_SMALL: return "buffer-too-small";
    case LBKAN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lbkan_last_error(void) { return g_last_error.c_str(); }
const char* lbkan_last_error_key(void) { return g_last_key.c_str(); }

int lbkan_exit_code(lbkan_status status) {
  switch (status) {
    case LBKAN_OK: return 0;
    case LBKAN_ERR_USAGE:
    case LBKAN_ERR_INVALID_ARGUMENT: return 2;
    case LBKAN_ERR_DIVERGED:
    case LBKAN_ERR_MC_FAILED: return 3;
    case LBKAN_ERR_IO: return 4;
    default: return 1;
  }
}

lbkan_status lbkan_config_create(lbkan_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new lbkan_config{};
  });
}

void lbkan_config_destroy(lbkan_config* cfg) { delete cfg; }

lbkan_status lbkan_config_set(lbkan_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "null argument");
    cfg->cfg.set(key, value);
  });
}

lbkan_status lbkan_config_load_file(lbkan_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg != nullptr && path != nullptr, "null argument");
    cfg->cfg.load_file(path);
  });
}

lbkan_status lbkan_config_to_json(const lbkan_config* cfg, char* buffer,
                                  size_t capacity, size_t* length) {
  std::string text;
  const lbkan_status st = guarded([&] {
    require(cfg != nullptr, "null config");
    text = cfg->cfg.to_json();
  });
  if (st != LBKAN_OK) return st;
  if (length != nullptr) *length = text.size();
  if (buffer == nullptr || capacity <= text.size()) {
    if (buffer != nullptr && capacity > 0) buffer[0] = '\0';
    return fail(LBKAN_ERR_BUFFER_TOO_SMALL, "buffer too small for config JSON");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return LBKAN_OK;
}

size_t lbkan_config_key_count(void) { return lbkan::RunConfig::keys().size(); }

const char* lbkan_config_key_name(size_t index) {
  const auto& keys = lbkan::RunConfig::keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

lbkan_status lbkan_execute(const lbkan_config* cfg, const char* command) {
  return guarded([&] {
    require(cfg != nullptr && command != nullptr, "null argument");
    lbkan::dispatch(command, cfg->cfg);
  });
}

lbkan_status lbkan_kan_create(const int* widths, size_t width_count, int grid_size,
                              int spline_order, double grid_lo, double grid_hi,
                              lbkan_kan** out) {
  return guarded([&] {
    require(out != nullptr && widths != nullptr, "null argument");
    lbkan::KanShape shape(std::vector<int>(widths, widths + width_count),
                          lbkan::SplineGrid(spline_order, grid_size, grid_lo, grid_hi));
    *out = new lbkan_kan{std::move(shape), {}, {}};
  });
}

void lbkan_kan_destroy(lbkan_kan* kan) { delete kan; }

size_t lbkan_kan_param_count(const lbkan_kan* kan) {
  return kan != nullptr ? kan->shape.param_count() : 0;
}

size_t lbkan_kan_dim(const lbkan_kan* kan) {
  return kan != nullptr ? static_cast<size_t>(kan->shape.input_dim()) : 0;
}

lbkan_status lbkan_kan_forward(lbkan_kan* kan, const double* theta, size_t theta_len,
                               const double* x, size_t x_len, double* phi, size_t phi_len) {
  return guarded([&] {
    require_kan_call(kan, theta, theta_len, x, x_len);
    require(phi != nullptr && phi_len == static_cast<std::size_t>(kan->shape.output_dim()),
            "phi buffer does not match the network output");
    lbkan::forward(kan->shape, {theta, theta_len}, {x, x_len}, kan->eval);
    std::memcpy(phi, kan->eval.output.data(), phi_len * sizeof(double));
  });
}

lbkan_status lbkan_kan_jacobian(lbkan_kan* kan, const double* theta, size_t theta_len,
                                const double* x, size_t x_len, double* jac, size_t jac_len) {
  return guarded([&] {
    require_kan_call(kan, theta, theta_len, x, x_len);
    require(jac != nullptr && jac_len == theta_len * kan->shape.output_dim(),
            "jacobian buffer must hold dim * param_count values");
    lbkan::forward(kan->shape, {theta, theta_len}, {x, x_len}, kan->eval);
    lbkan::jacobian(kan->shape, {theta, theta_len}, kan->eval, kan->jac);
    std::memcpy(jac, kan->jac.data(), jac_len * sizeof(double));
  });
}

lbkan_gains lbkan_default_gains(void) {
  const lbkan::ControllerConfig c;
  return {c.k_e, c.k_s, c.gamma, c.theta_bar, c.proj_eps, c.sgn_smoothing ? 1 : 0,
          c.sgn_smoothing_delta};
}

lbkan_status lbkan_control_input(const lbkan_gains* gains, const double* phi_hat,
                                 const double* e, const double* xd_dot, size_t n,
                                 double* u) {
  return guarded([&] {
    require(gains && phi_hat && e && xd_dot && u, "null argument");
    const auto len = static_cast<Eigen::Index>(n);
    const Eigen::VectorXd out = lbkan::control_input(
        Eigen::Map<const Eigen::VectorXd>(phi_hat, len),
        Eigen::Map<const Eigen::VectorXd>(e, len),
        Eigen::Map<const Eigen::VectorXd>(xd_dot, len), to_controller(*gains));
    std::memcpy(u, out.data(), n * sizeof(double));
  });
}

lbkan_status lbkan_adaptation_rate(const lbkan_gains* gains, const double* jac, size_t n,
                                   size_t param_count, const double* e,
                                   const double* theta_hat, double* theta_dot) {
  return guarded([&] {
    require(gains && jac && e && theta_hat && theta_dot, "null argument");
    const lbkan::ControllerConfig ctrl = to_controller(*gains);
    const Eigen::Map<const Eigen::MatrixXd> j(jac, static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(param_count));
    const Eigen::VectorXd theta =
        Eigen::Map<const Eigen::VectorXd>(theta_hat, static_cast<Eigen::Index>(param_count));
    const Eigen::VectorXd raw = lbkan::update_direction(
        j, Eigen::Map<const Eigen::VectorXd>(e, static_cast<Eigen::Index>(n)), ctrl);
    const Eigen::VectorXd out = lbkan::project(theta, raw, ctrl);
    std::memcpy(theta_dot, out.data(), param_count * sizeof(double));
  });
}

}  // extern "C"
