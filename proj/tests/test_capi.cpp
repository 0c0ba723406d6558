#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lbkan/lbkan.h"
#include "test_util.hpp"

namespace {

struct Config {
  lbkan_config* handle = nullptr;
  Config() { REQUIRE(lbkan_config_create(&handle) == LBKAN_OK); }
  ~Config() { lbkan_config_destroy(handle); }
};

struct Kan {
  lbkan_kan* handle = nullptr;
  Kan(std::vector<int> widths, int grid, int order, double lo, double hi) {
    REQUIRE(lbkan_kan_create(widths.data(), widths.size(), grid, order, lo, hi, &handle) ==
            LBKAN_OK);
  }
  ~Kan() { lbkan_kan_destroy(handle); }
};

std::string json_of(const Config& cfg) {
  std::size_t length = 0;
  CHECK(lbkan_config_to_json(cfg.handle, nullptr, 0, &length) == LBKAN_ERR_BUFFER_TOO_SMALL);
  std::string text(length + 1, '\0');
  REQUIRE(lbkan_config_to_json(cfg.handle, text.data(), text.size(), &length) == LBKAN_OK);
  text.resize(length);
  return text;
}

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(std::string(lbkan_status_name(LBKAN_OK)) == "ok");
  CHECK(std::string(lbkan_status_name(LBKAN_ERR_USAGE)) == "usage");
  CHECK(lbkan_exit_code(LBKAN_OK) == 0);
  CHECK(lbkan_exit_code(LBKAN_ERR_USAGE) == 2);
  CHECK(lbkan_exit_code(LBKAN_ERR_INVALID_ARGUMENT) == 2);
  CHECK(lbkan_exit_code(LBKAN_ERR_DIVERGED) == 3);
  CHECK(lbkan_exit_code(LBKAN_ERR_MC_FAILED) == 3);
  CHECK(lbkan_exit_code(LBKAN_ERR_IO) == 4);
  CHECK(lbkan_exit_code(LBKAN_ERR_INTERNAL) == 1);
  CHECK(std::strlen(lbkan_version()) > 0);
}

TEST_CASE("configuration through the C surface") {
  Config cfg;
  CHECK(lbkan_config_set(cfg.handle, "gamma", "6") == LBKAN_OK);
  CHECK(json_of(cfg).find("\"gamma\": 6.0") != std::string::npos);

  CHECK(lbkan_config_set(cfg.handle, "k_e", "-1") == LBKAN_ERR_USAGE);
  CHECK(std::string(lbkan_last_error_key()) == "k_e");
  CHECK(std::string(lbkan_last_error()).find("k_e") != std::string::npos);
  CHECK(lbkan_config_set(cfg.handle, "bogus", "1") == LBKAN_ERR_USAGE);
  CHECK(std::string(lbkan_last_error_key()) == "bogus");

  CHECK(lbkan_config_load_file(cfg.handle, "/nonexistent/cfg.txt") == LBKAN_ERR_IO);
  CHECK(lbkan_config_set(nullptr, "gamma", "1") == LBKAN_ERR_INVALID_ARGUMENT);

  char tiny[4];
  std::size_t length = 0;
  CHECK(lbkan_config_to_json(cfg.handle, tiny, sizeof tiny, &length) == LBKAN_ERR_BUFFER_TOO_SMALL);
  CHECK(tiny[0] == '\0');
  CHECK(length > 100);

  CHECK(lbkan_config_key_count() > 30);
  CHECK(std::string(lbkan_config_key_name(0)) == "approximator");
  CHECK(lbkan_config_key_name(lbkan_config_key_count()) == nullptr);
}

TEST_CASE("execute reports usage and writes decompose output") {
  Config cfg;
  CHECK(lbkan_execute(cfg.handle, "fly") == LBKAN_ERR_USAGE);
  const auto dir = lbkan::testing::temp_dir("capi_decompose");
  const std::string out = (dir / "out").string();
  REQUIRE(lbkan_config_set(cfg.handle, "out_dir", out.c_str()) == LBKAN_OK);
  REQUIRE(lbkan_config_set(cfg.handle, "decompose_points", "16") == LBKAN_OK);
  REQUIRE(lbkan_execute(cfg.handle, "decompose") == LBKAN_OK);
  std::size_t edges = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out)) {
    if (entry.path().filename().string().rfind("edge_", 0) == 0) ++edges;
  }
  CHECK(edges == 64);
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "config.json"));
  CHECK_FALSE(std::filesystem::exists(out + ".partial"));
}

TEST_CASE("KAN handle forward and Jacobian") {
  Kan kan({4, 6, 4, 4}, 5, 3, -10.0, 10.0);
  REQUIRE(lbkan_kan_param_count(kan.handle) == 576);
  REQUIRE(lbkan_kan_dim(kan.handle) == 4);

  std::mt19937_64 rng(81);
  Eigen::VectorXd theta = lbkan::testing::random_vector(rng, 576, -0.3, 0.3);
  const Eigen::VectorXd x = lbkan::testing::random_vector(rng, 4, -8.0, 8.0);
  std::vector<double> jac(4 * 576);
  REQUIRE(lbkan_kan_jacobian(kan.handle, theta.data(), 576, x.data(), 4, jac.data(), jac.size()) ==
          LBKAN_OK);

  auto phi = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd out(4);
    REQUIRE(lbkan_kan_forward(kan.handle, t.data(), 576, x.data(), 4, out.data(), 4) == LBKAN_OK);
    return out;
  };
  const Eigen::MatrixXd fd = lbkan::testing::central_difference(phi, theta);
  const Eigen::Map<const Eigen::MatrixXd> got(jac.data(), 4, 576);
  CHECK(lbkan::testing::max_rel_err(got, fd) <= 1e-5);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(576);
  CHECK(phi(zero).norm() == 0.0);

  double out[4];
  CHECK(lbkan_kan_forward(kan.handle, theta.data(), 575, x.data(), 4, out, 4) ==
        LBKAN_ERR_INVALID_ARGUMENT);
  CHECK(lbkan_kan_forward(kan.handle, theta.data(), 576, x.data(), 3, out, 4) ==
        LBKAN_ERR_INVALID_ARGUMENT);
  CHECK(lbkan_kan_jacobian(kan.handle, theta.data(), 576, x.data(), 4, jac.data(), 10) ==
        LBKAN_ERR_INVALID_ARGUMENT);

  lbkan_kan* bad = nullptr;
  const int widths[] = {4};
  CHECK(lbkan_kan_create(widths, 1, 5, 3, -1.0, 1.0, &bad) == LBKAN_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
}

TEST_CASE("control law through the C surface") {
  const lbkan_gains gains = lbkan_default_gains();
  CHECK(gains.k_e == 11.0);
  CHECK(gains.gamma == 4.2);
  const double phi[4] = {0, 0, 0, 0};
  const double e[4] = {1, 0, 0, 0};
  const double xd_dot[4] = {0, 0, 0, 0};
  double u[4];
  REQUIRE(lbkan_control_input(&gains, phi, e, xd_dot, 4, u) == LBKAN_OK);
  CHECK(u[0] == doctest::Approx(-11.01));
  CHECK(u[1] == 0.0);

  const double jac[2 * 3] = {1, 0, 0, 1, 1, 1};
  const double err[2] = {0.5, -1.0};
  const double theta_in[3] = {0.1, 0.2, 0.3};
  double theta_dot[3];
  REQUIRE(lbkan_adaptation_rate(&gains, jac, 2, 3, err, theta_in, theta_dot) == LBKAN_OK);
  CHECK(theta_dot[0] == doctest::Approx(4.2 * 0.5));
  CHECK(theta_dot[1] == doctest::Approx(-4.2));
  CHECK(theta_dot[2] == doctest::Approx(4.2 * -0.5));

  const double outside[3] = {6.0, 0.0, 0.0};
  CHECK(lbkan_adaptation_rate(&gains, jac, 2, 3, err, outside, theta_dot) == LBKAN_ERR_CONTRACT);

  lbkan_gains bad = gains;
  bad.k_e = -1.0;
  CHECK(lbkan_control_input(&bad, phi, e, xd_dot, 4, u) == LBKAN_ERR_INVALID_ARGUMENT);
}
