#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "lbkan/config.hpp"
#include "lbkan/errors.hpp"
#include "test_util.hpp"

using lbkan::RunConfig;

namespace {

std::string usage_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    cfg.set(key, value);
  } catch (const lbkan::UsageError& e) {
    return e.key();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.approximator == lbkan::ApproximatorKind::Kan);
  CHECK(cfg.dt == 0.001);
  CHECK(cfg.t_final == 100.0);
  CHECK(cfg.kan_shape == std::vector<int>{4, 6, 4, 4});
  CHECK(cfg.grid_size == 5);
  CHECK(cfg.spline_order == 3);
  CHECK(cfg.dnn_widths == std::vector<int>{4, 5, 5, 5, 4});
  CHECK(cfg.ctrl.k_e == 11.0);
  CHECK(cfg.ctrl.k_s == 0.01);
  CHECK(cfg.ctrl.gamma == 4.2);
  CHECK(cfg.ctrl.theta_bar == 5.0);
  CHECK(cfg.mc_candidates == 100);
  CHECK(cfg.effective_candidates() == 100);
  CHECK(cfg.mc_horizon == 60.0);
  CHECK(cfg.runs == 20);
  CHECK(cfg.init_range == 0.1);
  CHECK(cfg.integrator == lbkan::Integrator::Euler);
  CHECK_FALSE(cfg.x0.has_value());
}

TEST_CASE("set parses values and accepts dashed keys") {
  RunConfig cfg;
  cfg.set("k-e", "7.5");
  cfg.set("approximator", "dnn");
  cfg.set("x0", "1, -2, 3.5, 0");
  cfg.set("full", "true");
  cfg.set("integrator", "rk4");
  cfg.set("kan_shape", "4,8,4");
  cfg.set("seed", "18446744073709551615");
  CHECK(cfg.ctrl.k_e == 7.5);
  CHECK(cfg.approximator == lbkan::ApproximatorKind::Dnn);
  CHECK(*cfg.x0 == Eigen::Vector4d(1, -2, 3.5, 0));
  CHECK(cfg.effective_candidates() == 1000);
  CHECK(cfg.kan_shape == std::vector<int>{4, 8, 4});
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK_THROWS_AS(cfg.validate_for("run"), lbkan::UsageError);
  cfg.set("sgn_smoothing", "yes");
  CHECK_NOTHROW(cfg.validate_for("run"));
}

TEST_CASE("invalid values name the offending key") {
  RunConfig cfg;
  CHECK(usage_key(cfg, "k_e", "-1") == "k_e");
  CHECK(usage_key(cfg, "gamma", "abc") == "gamma");
  CHECK(usage_key(cfg, "dt", "0") == "dt");
  CHECK(usage_key(cfg, "approximator", "rnn") == "approximator");
  CHECK(usage_key(cfg, "x0", "1,2,3") == "x0");
  CHECK(usage_key(cfg, "kan_shape", "3,6,4") == "kan_shape");
  CHECK(usage_key(cfg, "runs", "0") == "runs");
  CHECK(usage_key(cfg, "seed", "-4") == "seed");
  CHECK(usage_key(cfg, "t_final", "inf") == "t_final");
  CHECK(usage_key(cfg, "no_such_key", "1") == "no_such_key");
  CHECK(cfg.ctrl.k_e == 11.0);
}

TEST_CASE("cross-field validation") {
  RunConfig cfg;
  cfg.set("grid_lo", "3");
  cfg.set("grid_hi", "1");
  CHECK_THROWS_AS(cfg.validate_for("run"), lbkan::UsageError);
  cfg = RunConfig{};
  cfg.set("t_final", "10");
  CHECK_NOTHROW(cfg.validate_for("mc-init"));
  CHECK_THROWS_AS(cfg.validate_for("compare"), lbkan::UsageError);
  cfg.set("skip_transient", "20");
  CHECK_THROWS_AS(cfg.validate_for("run"), lbkan::UsageError);
}

TEST_CASE("file values are overridden by later sets") {
  const auto dir = lbkan::testing::temp_dir("config_file");
  const auto path = dir / "cfg.txt";
  {
    std::ofstream os(path);
    os << "# tuning\n\ngamma = 20\nk_s=0.05  # trailing comment\n";
  }
  RunConfig cfg;
  cfg.load_file(path);
  CHECK(cfg.ctrl.gamma == 20.0);
  CHECK(cfg.ctrl.k_s == 0.05);
  cfg.set("gamma", "6");
  CHECK(cfg.ctrl.gamma == 6.0);

  {
    std::ofstream os(path);
    os << "gamma 20\n";
  }
  CHECK_THROWS_AS(cfg.load_file(path), lbkan::UsageError);
  CHECK_THROWS_AS(cfg.load_file(dir / "missing.txt"), lbkan::IoError);
}

TEST_CASE("json echo lists every key") {
  RunConfig cfg;
  cfg.set("traj_a", "1.25");
  const auto j = nlohmann::json::parse(cfg.to_json());
  CHECK(j.size() == RunConfig::keys().size());
  for (const auto& key : RunConfig::keys()) CHECK(j.contains(key));
  CHECK(j["traj_a"] == 1.25);
  CHECK(j["traj_b"].is_null());
  CHECK(j["kan_shape"] == nlohmann::json::array({4, 6, 4, 4}));
  CHECK(j["approximator"] == "kan");
}
