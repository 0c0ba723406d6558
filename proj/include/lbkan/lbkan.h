/*
 * lbkan C API.
 *
 * Opaque handles plus status codes over the C++ core: configuration and the
 * command-line subcommands, the KAN approximator with its parameter
 * Jacobian, and the adaptive control law. Functions never throw; on failure
 * they return a nonzero status and lbkan_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread).
 *
 * Matrices cross the boundary as column-major double arrays.
 */
#ifndef LBKAN_H
#define LBKAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LBKAN_BUILDING_LIBRARY)
#define LBKAN_API __declspec(dllexport)
#else
#define LBKAN_API __declspec(dllimport)
#endif
#else
#define LBKAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lbkan_status {
  LBKAN_OK = 0,
  LBKAN_ERR_INVALID_ARGUMENT = 1,
  LBKAN_ERR_USAGE = 2,          /* unknown key, malformed or out-of-range value */
  LBKAN_ERR_DIVERGED = 3,       /* simulation left the divergence bound */
  LBKAN_ERR_IO = 4,
  LBKAN_ERR_CONTRACT = 5,       /* precondition broken (stale cache, etc.) */
  LBKAN_ERR_MC_FAILED = 6,      /* every Monte Carlo candidate diverged */
  LBKAN_ERR_BUFFER_TOO_SMALL = 7,
  LBKAN_ERR_INTERNAL = 8
} lbkan_status;

typedef struct lbkan_config lbkan_config;
typedef struct lbkan_kan lbkan_kan;

LBKAN_API const char* lbkan_version(void);
LBKAN_API const char* lbkan_status_name(lbkan_status status);
LBKAN_API const char* lbkan_last_error(void);
/* Configuration key blamed by the last LBKAN_ERR_USAGE, or "". */
LBKAN_API const char* lbkan_last_error_key(void);
/* Process exit code for a status: 0 ok, 2 usage, 3 diverged, 4 I/O, 1 other. */
LBKAN_API int lbkan_exit_code(lbkan_status status);

/* ---- configuration and subcommands ------------------------------------ */

/* New configuration holding the default values. */
LBKAN_API lbkan_status lbkan_config_create(lbkan_config** out);
LBKAN_API void lbkan_config_destroy(lbkan_config* cfg);
LBKAN_API lbkan_status lbkan_config_set(lbkan_config* cfg, const char* key,
                                        const char* value);
/* key=value lines; later calls to lbkan_config_set override file values. */
LBKAN_API lbkan_status lbkan_config_load_file(lbkan_config* cfg, const char* path);
/* Resolved configuration as JSON. Writes at most `capacity` bytes including
 * the terminator; `*length` receives the full length without terminator. */
LBKAN_API lbkan_status lbkan_config_to_json(const lbkan_config* cfg, char* buffer,
                                            size_t capacity, size_t* length);
/* Number of known keys and their names, for help output. */
LBKAN_API size_t lbkan_config_key_count(void);
LBKAN_API const char* lbkan_config_key_name(size_t index);

/* Runs "run", "mc-init", "compare" or "decompose" into the configured out_dir. */
LBKAN_API lbkan_status lbkan_execute(const lbkan_config* cfg, const char* command);

/* ---- KAN approximator --------------------------------------------------- */

LBKAN_API lbkan_status lbkan_kan_create(const int* widths, size_t width_count,
                                        int grid_size, int spline_order,
                                        double grid_lo, double grid_hi,
                                        lbkan_kan** out);
LBKAN_API void lbkan_kan_destroy(lbkan_kan* kan);
LBKAN_API size_t lbkan_kan_param_count(const lbkan_kan* kan);
LBKAN_API size_t lbkan_kan_dim(const lbkan_kan* kan);

/* phi = Phi(x, theta); `phi` has dim entries. A handle carries scratch
 * memory: use one handle per thread. */
LBKAN_API lbkan_status lbkan_kan_forward(lbkan_kan* kan, const double* theta,
                                         size_t theta_len, const double* x,
                                         size_t x_len, double* phi, size_t phi_len);
/* dPhi/dtheta, dim x param_count, column-major (jac_len = dim * param_count). */
LBKAN_API lbkan_status lbkan_kan_jacobian(lbkan_kan* kan, const double* theta,
                                          size_t theta_len, const double* x,
                                          size_t x_len, double* jac, size_t jac_len);

/* ---- control law --------------------------------------------------------- */

typedef struct lbkan_gains {
  double k_e;
  double k_s;
  double gamma;
  double theta_bar;
  double proj_eps;
  int sgn_smoothing;          /* nonzero: tanh(e / delta) instead of sgn(e) */
  double sgn_smoothing_delta;
} lbkan_gains;

/* Default gains (k_e 11, k_s 0.01, gamma 4.2, theta_bar 5, proj_eps 0.1). */
LBKAN_API lbkan_gains lbkan_default_gains(void);

/* u = -phi_hat - k_e e - k_s sgn(e) + xd_dot, all of length n. */
LBKAN_API lbkan_status lbkan_control_input(const lbkan_gains* gains, const double* phi_hat,
                                           const double* e, const double* xd_dot,
                                           size_t n, double* u);
/* theta_dot = proj(gamma J^T e); jac is n x param_count column-major. */
LBKAN_API lbkan_status lbkan_adaptation_rate(const lbkan_gains* gains, const double* jac,
                                             size_t n, size_t param_count,
                                             const double* e, const double* theta_hat,
                                             double* theta_dot);

#ifdef __cplusplus
}
#endif

#endif /* LBKAN_H */
