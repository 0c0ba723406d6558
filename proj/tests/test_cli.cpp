#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lbkan_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(LBKAN_CLI_PATH) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream is(err);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::size_t line_count(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is);
}

}  // namespace

TEST_CASE("run writes one row per step plus the initial state") {
  const fs::path dir = scratch("run");
  const fs::path out = dir / "out";
  const Result r = cli("run --t_final 0.01 --out_dir " + out.string(), dir);
  REQUIRE(r.code == 0);
  CHECK(line_count(out / "run.csv") == 1 + 11);
  CHECK(line_count(out / "theta_final.csv") == 576);
  const auto summary = read_json(out / "summary.json");
  CHECK(summary["records"] == 11);
  CHECK(summary["approximator"] == "kan");
  const auto config = read_json(out / "config.json");
  CHECK(config["t_final"] == 0.01);
  CHECK_FALSE(fs::exists(dir / "out.partial"));
}

TEST_CASE("dnn run and csv stride") {
  const fs::path dir = scratch("run_dnn");
  const fs::path out = dir / "out";
  REQUIRE(cli("run --approximator dnn --t_final 0.1 --csv-stride 10 --out_dir " + out.string(), dir)
              .code == 0);
  CHECK(line_count(out / "run.csv") == 1 + 11);
  CHECK(line_count(out / "theta_final.csv") == 109);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = scratch("precedence");
  {
    std::ofstream os(dir / "cfg.txt");
    os << "gamma = 20\nk_s = 0.02\n";
  }
  const fs::path out = dir / "out";
  REQUIRE(cli("run --config " + (dir / "cfg.txt").string() + " --gamma 6 --t_final 0.002 --out_dir " +
                  out.string(),
              dir)
              .code == 0);
  const auto config = read_json(out / "config.json");
  CHECK(config["gamma"] == 6.0);
  CHECK(config["k_s"] == 0.02);
}

TEST_CASE("usage errors exit 2 and leave no output") {
  const fs::path dir = scratch("usage");
  const fs::path out = dir / "out";
  Result r = cli("run --k_e -1 --out_dir " + out.string(), dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("k_e") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(dir / "out.partial"));

  CHECK(cli("fly", dir).code == 2);
  CHECK(cli("run --no-such-flag 1", dir).code == 2);
  CHECK(cli("", dir).code == 2);
  CHECK(cli("run --integrator rk4 --out_dir " + out.string(), dir).code == 2);

  {
    std::ofstream os(dir / "short.csv");
    os << "0.1\n0.2\n";
  }
  r = cli("run --theta0_file " + (dir / "short.csv").string() + " --out_dir " + out.string(), dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("theta0_file") != std::string::npos);
}

TEST_CASE("missing config file exits 4") {
  const fs::path dir = scratch("io");
  CHECK(cli("run --config " + (dir / "missing.txt").string(), dir).code == 4);
}

TEST_CASE("divergence exits 3 and removes partial output") {
  const fs::path dir = scratch("diverge");
  const fs::path out = dir / "out";
  const Result r = cli("run --dt 0.5 --t_final 50 --out_dir " + out.string(), dir);
  CHECK(r.code == 3);
  CHECK(r.err.find("diverged") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(dir / "out.partial"));
}

TEST_CASE("decompose writes one file per edge") {
  const fs::path dir = scratch("decompose");
  const fs::path out = dir / "out";
  REQUIRE(cli("decompose --decompose-points 33 --out_dir " + out.string(), dir).code == 0);
  std::size_t edges = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().filename().string().rfind("edge_l", 0) == 0) ++edges;
  }
  CHECK(edges == 64);
  const fs::path sample = out / "edge_l2_j4_i6.csv";
  REQUIRE(fs::exists(sample));
  CHECK(line_count(sample) == 1 + 33);
  std::ifstream is(sample);
  std::string header;
  std::getline(is, header);
  CHECK(header == "eta,phi_value");
  CHECK_FALSE(fs::exists(out / "edge_l2_j6_i4.csv"));
}

TEST_CASE("mc-init writes the selected weights and the cost table") {
  const fs::path dir = scratch("mc");
  const fs::path out = dir / "out";
  REQUIRE(cli("mc-init --mc_candidates 3 --mc_horizon 0.05 --out_dir " + out.string(), dir).code ==
          0);
  CHECK(line_count(out / "theta0.csv") == 576);
  CHECK(fs::file_size(out / "theta0.bin") == 8 + 8 * 576);
  CHECK(line_count(out / "mc_costs.csv") == 1 + 3);
  const auto summary = read_json(out / "mc_summary.json");
  CHECK(summary["candidates"] == 3);
  CHECK(summary["best_index"].get<int>() < 3);

  // The selected weights feed a later run.
  const fs::path run_out = dir / "run";
  CHECK(cli("run --t_final 0.01 --theta0_file " + (out / "theta0.bin").string() + " --out_dir " +
                run_out.string(),
            dir)
            .code == 0);
}

TEST_CASE("compare produces paired rows for both architectures") {
  const fs::path dir = scratch("compare");
  const fs::path out = dir / "out";
  REQUIRE(cli("compare --runs 2 --t_final 0.05 --mc_candidates 2 --mc_horizon 0.02 --threads 2 "
              "--out_dir " +
                  out.string(),
              dir)
              .code == 0);
  const auto report = read_json(out / "report.json");
  REQUIRE(report["architectures"].size() == 2);
  CHECK(report["architectures"][0]["name"] == "kan");
  CHECK(report["architectures"][1]["name"] == "dnn");
  CHECK(report["architectures"][1]["gamma"] == 6.0);
  for (const auto& arch : report["architectures"]) {
    REQUIRE(arch["rows"].size() == 2);
    CHECK(arch["rows"][0]["x0"] == report["architectures"][0]["rows"][0]["x0"]);
    CHECK(arch["rows"][1]["trajectory"] == report["architectures"][0]["rows"][1]["trajectory"]);
    CHECK(arch["used_runs"] == 2);
  }
  CHECK(report.contains("f_err_improvement_pct"));
  for (const char* name : {"kan_run0.csv", "kan_run1.csv", "dnn_run0.csv", "dnn_run1.csv"}) {
    CHECK(line_count(out / "runs" / name) == 1 + 51);
  }
  CHECK(fs::exists(out / "theta0_kan.csv"));
  CHECK(fs::exists(out / "theta0_dnn.csv"));
}
