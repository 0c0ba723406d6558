#include "lbkan/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <system_error>

#include <json.hpp>

#include "lbkan/errors.hpp"
#include "lbkan/param_io.hpp"
#include "lbkan/sim.hpp"

namespace lbkan {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Output directory written through "<out>.partial"; entries move into <out>
// only on commit(), otherwise the staging directory is deleted.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path out)
      : out_(std::move(out)), stage_(out_.string() + ".partial") {
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(stage_, ec);
    }
  }

  const fs::path& dir() const noexcept { return stage_; }

  void commit() {
    fs::create_directories(out_);
    for (const auto& entry : fs::directory_iterator(stage_)) {
      const fs::path target = out_ / entry.path().filename();
      fs::remove_all(target);
      fs::rename(entry.path(), target);
    }
    fs::remove_all(stage_);
    committed_ = true;
  }

 private:
  fs::path out_;
  fs::path stage_;
  bool committed_ = false;
};

template <typename Fn>
void with_io_errors(Fn&& fn) {
  try {
    fn();
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

json vec4_json(const Eigen::Vector4d& v) { return json::array({v[0], v[1], v[2], v[3]}); }

json trajectory_json(const Trajectory& t) {
  return json{{"a", t.a}, {"b", t.b}, {"c", t.c}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Eigen::VectorXd initial_weights(const RunConfig& cfg, const std::string& file,
                                std::size_t param_count) {
  if (file.empty()) return sample_weights(cfg.seed, 0, param_count, cfg.init_range);
  Eigen::VectorXd theta = load_params(file);
  if (static_cast<std::size_t>(theta.size()) != param_count) {
    throw UsageError("theta0_file", file + " holds " + std::to_string(theta.size()) +
                                        " weights, the network needs " +
                                        std::to_string(param_count));
  }
  return theta;
}

McConfig mc_config(const RunConfig& cfg) {
  McConfig mc;
  mc.num_candidates = cfg.effective_candidates();
  mc.init_range = cfg.init_range;
  mc.horizon = cfg.mc_horizon;
  mc.dt = cfg.dt;
  mc.seed = cfg.seed;
  mc.threads = cfg.effective_threads();
  return mc;
}

PlantSpec default_plant() { return PlantSpec{}; }

}  // namespace

KanShape make_kan_shape(const RunConfig& cfg) {
  return KanShape(cfg.kan_shape, SplineGrid(cfg.spline_order, cfg.grid_size,
                                            cfg.grid_lo, cfg.grid_hi));
}

MlpShape make_mlp_shape(const RunConfig& cfg) { return MlpShape(cfg.dnn_widths); }

ArchitectureSetup make_architecture(const RunConfig& cfg, ApproximatorKind kind) {
  ArchitectureSetup arch;
  arch.ctrl = cfg.ctrl;
  if (kind == ApproximatorKind::Kan) {
    arch.prototype = std::make_shared<KanApproximator>(make_kan_shape(cfg));
  } else {
    arch.prototype = std::make_shared<MlpApproximator>(make_mlp_shape(cfg));
    arch.ctrl.gamma = cfg.gamma_dnn;
  }
  return arch;
}

void run_command(const RunConfig& cfg) {
  cfg.validate_for("run");
  with_io_errors([&] {
    StagedOutput out(cfg.out_dir);
    write_text(out.dir() / "config.json", cfg.to_json());

    const ArchitectureSetup arch = make_architecture(cfg, cfg.approximator);
    Scenario scenario = compare_scenario(cfg.seed, 0);
    if (cfg.x0) scenario.x0 = *cfg.x0;
    if (cfg.traj_a) scenario.trajectory.a = *cfg.traj_a;
    if (cfg.traj_b) scenario.trajectory.b = *cfg.traj_b;
    if (cfg.traj_c) scenario.trajectory.c = *cfg.traj_c;

    PlantSpec plant = default_plant();
    plant.trajectory = scenario.trajectory;
    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_final = cfg.t_final;
    sim.x0 = scenario.x0;
    sim.theta0 = initial_weights(cfg, cfg.theta0_file, arch.prototype->param_count());
    sim.seed = cfg.seed;
    sim.integrator = cfg.integrator;
    sim.skip_transient = cfg.skip_transient;

    std::ofstream csv = open_out(out.dir() / "run.csv");
    write_csv_header(csv);
    std::size_t counter = 0;
    auto approx = arch.prototype->clone();
    const StreamResult res =
        run_streaming(sim, plant, arch.ctrl, *approx, [&](const StepRecord& r) {
          if (counter++ % cfg.csv_stride == 0) write_csv_row(csv, r);
        });
    csv.close();
    if (!csv) throw IoError("failed writing run.csv");

    const RunSummary& s = res.summary;
    json summary{
        {"approximator", approx->name()},
        {"param_count", approx->param_count()},
        {"seed", s.seed},
        {"records", s.records},
        {"mean_e_norm", s.mean_e_norm},
        {"mean_f_err_norm", s.mean_f_err_norm},
        {"cost", s.cost},
        {"max_theta_norm", s.max_theta_norm},
        {"max_e_norm_after_transient", s.max_e_norm_after_transient},
        {"skip_transient", s.skip_transient},
        {"x0", vec4_json(s.x0)},
        {"trajectory", trajectory_json(s.trajectory)},
    };
    write_text(out.dir() / "summary.json", summary.dump(2));
    save_params(out.dir() / "theta_final.csv", res.final_theta);
    out.commit();
  });
}

void mc_init_command(const RunConfig& cfg) {
  cfg.validate_for("mc-init");
  with_io_errors([&] {
    StagedOutput out(cfg.out_dir);
    write_text(out.dir() / "config.json", cfg.to_json());
    const ArchitectureSetup arch = make_architecture(cfg, cfg.approximator);
    const McResult mc = mc_init(mc_config(cfg), arch, default_plant());

    save_params(out.dir() / "theta0.csv", mc.best_theta);
    save_params(out.dir() / "theta0.bin", mc.best_theta);
    std::ofstream costs = open_out(out.dir() / "mc_costs.csv");
    costs << "candidate,cost,diverged\n";
    char buf[128];
    for (const McCandidate& c : mc.table) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%d\n", c.index, c.cost, c.diverged ? 1 : 0);
      costs << buf;
    }
    costs.close();
    if (!costs) throw IoError("failed writing mc_costs.csv");

    std::size_t diverged = 0;
    for (const McCandidate& c : mc.table) diverged += c.diverged ? 1 : 0;
    json summary{
        {"approximator", arch.prototype->name()},
        {"param_count", arch.prototype->param_count()},
        {"candidates", mc.table.size()},
        {"diverged", diverged},
        {"best_index", mc.best_index},
        {"best_cost", mc.table[mc.best_index].cost},
        {"horizon", cfg.mc_horizon},
        {"seed", cfg.seed},
        {"x0", vec4_json(mc.scenario.x0)},
        {"trajectory", trajectory_json(mc.scenario.trajectory)},
    };
    write_text(out.dir() / "mc_summary.json", summary.dump(2));
    out.commit();
  });
}

void compare_command(const RunConfig& cfg) {
  cfg.validate_for("compare");
  with_io_errors([&] {
    StagedOutput out(cfg.out_dir);
    write_text(out.dir() / "config.json", cfg.to_json());

    struct Entry {
      ApproximatorKind kind;
      std::string file;
    };
    const Entry entries[] = {{ApproximatorKind::Kan, cfg.theta0_file},
                             {ApproximatorKind::Dnn, cfg.theta0_dnn_file}};
    std::vector<ArchitectureSetup> archs;
    json init = json::array();
    for (const Entry& entry : entries) {
      ArchitectureSetup arch = make_architecture(cfg, entry.kind);
      json info{{"name", arch.prototype->name()},
                {"gamma", arch.ctrl.gamma},
                {"param_count", arch.prototype->param_count()}};
      if (entry.file.empty()) {
        const McResult mc = mc_init(mc_config(cfg), arch, default_plant());
        arch.theta0 = mc.best_theta;
        info["theta0_source"] = "mc-init";
        info["mc_candidates"] = mc.table.size();
        info["mc_best_index"] = mc.best_index;
        info["mc_best_cost"] = mc.table[mc.best_index].cost;
      } else {
        arch.theta0 = load_params(entry.file);
        if (static_cast<std::size_t>(arch.theta0.size()) != arch.prototype->param_count()) {
          throw UsageError(entry.kind == ApproximatorKind::Kan ? "theta0_file" : "theta0_dnn_file",
                           entry.file + " does not match the network's parameter count");
        }
        info["theta0_source"] = entry.file;
      }
      save_params(out.dir() / ("theta0_" + arch.prototype->name() + ".csv"), arch.theta0);
      init.push_back(info);
      archs.push_back(std::move(arch));
    }

    CompareConfig cc;
    cc.num_runs = cfg.runs;
    cc.t_final = cfg.t_final;
    cc.dt = cfg.dt;
    cc.skip_transient = cfg.skip_transient;
    cc.seed = cfg.seed;
    cc.threads = cfg.effective_threads();
    cc.run_dir = out.dir() / "runs";
    cc.csv_stride = cfg.csv_stride;
    const ComparisonReport report = compare(archs, default_plant(), cc);

    json arch_json = json::array();
    for (std::size_t a = 0; a < report.architectures.size(); ++a) {
      const ArchitectureStats& st = report.architectures[a];
      json rows = json::array();
      for (const RunRow& r : st.rows) {
        rows.push_back(json{{"run", r.run_index},
                            {"x0", vec4_json(r.scenario.x0)},
                            {"trajectory", trajectory_json(r.scenario.trajectory)},
                            {"mean_e_norm", r.mean_e_norm},
                            {"mean_f_err_norm", r.mean_f_err_norm},
                            {"max_theta_norm", r.max_theta_norm},
                            {"diverged", r.diverged},
                            {"error", r.error}});
      }
      json entry = init[a];
      entry["used_runs"] = st.used_runs;
      entry["diverged_runs"] = st.diverged_runs;
      entry["mean_e_norm"] = number_or_null(st.mean_e_norm);
      entry["std_e_norm"] = number_or_null(st.std_e_norm);
      entry["mean_f_err_norm"] = number_or_null(st.mean_f_err_norm);
      entry["std_f_err_norm"] = number_or_null(st.std_f_err_norm);
      entry["rows"] = rows;
      arch_json.push_back(entry);
    }
    const double kan_f = report.architectures[0].mean_f_err_norm;
    const double dnn_f = report.architectures[1].mean_f_err_norm;
    json doc{
        {"seed", cfg.seed},
        {"runs", cfg.runs},
        {"t_final", cfg.t_final},
        {"skip_transient", cfg.skip_transient},
        {"run_scenarios", "run i uses scenario stream i of the seed, shared by all architectures"},
        {"f_err_improvement_pct", number_or_null(100.0 * (dnn_f - kan_f) / dnn_f)},
        {"architectures", arch_json},
        {"config", json::parse(cfg.to_json())},
    };
    write_text(out.dir() / "report.json", doc.dump(2));
    out.commit();
  });
}

void decompose_command(const RunConfig& cfg) {
  cfg.validate_for("decompose");
  with_io_errors([&] {
    StagedOutput out(cfg.out_dir);
    write_text(out.dir() / "config.json", cfg.to_json());
    const KanShape shape = make_kan_shape(cfg);
    const Eigen::VectorXd theta = initial_weights(cfg, cfg.theta0_file, shape.param_count());
    const std::size_t points = cfg.decompose_points;
    const double lo = shape.grid().lo();
    const double hi = shape.grid().hi();
    char buf[96];
    for (int l = 0; l < shape.layer_count(); ++l) {
      for (int j = 0; j < shape.layer_rows(l); ++j) {
        for (int i = 0; i < shape.widths()[l]; ++i) {
          const std::string name = "edge_l" + std::to_string(l + 1) + "_j" +
                                   std::to_string(j + 1) + "_i" + std::to_string(i + 1) + ".csv";
          std::ofstream os = open_out(out.dir() / name);
          os << "eta,phi_value\n";
          for (std::size_t p = 0; p < points; ++p) {
            const double eta = lo + (hi - lo) * static_cast<double>(p) /
                                        static_cast<double>(points - 1);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", eta,
                          edge_activation(shape, as_span(theta), l, j, i, eta));
            os << buf;
          }
          if (!os) throw IoError("failed writing " + name);
        }
      }
    }
    out.commit();
  });
}

void dispatch(const std::string& command, const RunConfig& cfg) {
  if (command == "run") return run_command(cfg);
  if (command == "mc-init") return mc_init_command(cfg);
  if (command == "compare") return compare_command(cfg);
  if (command == "decompose") return decompose_command(cfg);
  throw UsageError("command", "unknown subcommand '" + command +
                                  "' (expected run, mc-init, compare, decompose)");
}

}  // namespace lbkan
