#include "lbkan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

// Stream ids: comparison runs use [0, 2^32), the Monte Carlo scenario and
// candidate weights live above.
constexpr std::uint64_t kMcScenarioStream = 1ULL << 40;
constexpr std::uint64_t kMcWeightStream = 1ULL << 41;

}  // namespace

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  std::size_t first_error_index = count;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < first_error_index) {
              first_error_index = i;
              first_error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

void McConfig::validate() const {
  if (num_candidates < 1) throw InvalidArgument("mc: num_candidates must be >= 1");
  if (!(init_range > 0.0)) throw InvalidArgument("mc: init_range must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("mc: dt must be > 0");
  if (!(horizon >= dt)) throw InvalidArgument("mc: horizon must be >= dt");
}

Scenario mc_scenario(std::uint64_t seed) {
  auto rng = make_stream(seed, kMcScenarioStream);
  return sample_scenario(rng);
}

Eigen::VectorXd sample_weights(std::uint64_t seed, std::size_t index,
                               std::size_t param_count, double range) {
  auto rng = make_stream(seed, kMcWeightStream + index);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = uniform(rng, -range, range);
  return theta;
}

McResult mc_select(const McConfig& cfg, const ArchitectureSetup& arch,
                   const PlantSpec& plant, const Scenario& scenario,
                   const std::vector<Eigen::VectorXd>& candidates) {
  cfg.validate();
  if (candidates.empty()) throw InvalidArgument("mc: no candidates");
  PlantSpec run_plant = plant;
  run_plant.trajectory = scenario.trajectory;

  McResult result;
  result.scenario = scenario;
  result.table.resize(candidates.size());
  parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_final = cfg.horizon;
    sim.x0 = scenario.x0;
    sim.theta0 = candidates[i];
    sim.seed = cfg.seed;
    sim.cost_horizon = cfg.horizon;
    McCandidate& row = result.table[i];
    row.index = i;
    auto approx = arch.prototype->clone();
    try {
      const RunSummary summary = run_streaming(sim, run_plant, arch.ctrl, *approx, {}).summary;
      row.cost = summary.cost;
      row.max_theta_norm = summary.max_theta_norm;
    } catch (const SimulationDiverged& e) {
      row.diverged = true;
      row.cost = std::numeric_limits<double>::infinity();
      row.error = e.what();
    }
  });

  bool found = false;
  for (const McCandidate& row : result.table) {
    if (row.diverged) continue;
    if (!found || row.cost < result.table[result.best_index].cost) {
      result.best_index = row.index;
      found = true;
    }
  }
  if (!found) {
    throw McFailed("mc: all " + std::to_string(candidates.size()) +
                   " candidates diverged; first error: " + result.table.front().error);
  }
  result.best_theta = candidates[result.best_index];
  return result;
}

McResult mc_init(const McConfig& cfg, const ArchitectureSetup& arch,
                 const PlantSpec& plant) {
  cfg.validate();
  std::vector<Eigen::VectorXd> candidates;
  candidates.reserve(cfg.num_candidates);
  for (std::size_t i = 0; i < cfg.num_candidates; ++i) {
    candidates.push_back(
        sample_weights(cfg.seed, i, arch.prototype->param_count(), cfg.init_range));
  }
  return mc_select(cfg, arch, plant, mc_scenario(cfg.seed), candidates);
}

void CompareConfig::validate() const {
  if (num_runs < 1) throw InvalidArgument("compare: num_runs must be >= 1");
  if (!(dt > 0.0)) throw InvalidArgument("compare: dt must be > 0");
  if (!(t_final >= dt)) throw InvalidArgument("compare: t_final must be >= dt");
  if (csv_stride < 1) throw InvalidArgument("compare: csv_stride must be >= 1");
}

Scenario compare_scenario(std::uint64_t seed, std::size_t run_index) {
  auto rng = make_stream(seed, run_index);
  return sample_scenario(rng);
}

MeanStd mean_std(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  if (values.empty()) {
    return {std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN()};
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

ComparisonReport compare(const std::vector<ArchitectureSetup>& archs,
                         const PlantSpec& plant, const CompareConfig& cfg) {
  cfg.validate();
  if (archs.empty()) throw InvalidArgument("compare: no architectures");
  if (!cfg.run_dir.empty()) std::filesystem::create_directories(cfg.run_dir);

  std::vector<Scenario> scenarios;
  for (std::size_t r = 0; r < cfg.num_runs; ++r) {
    scenarios.push_back(compare_scenario(cfg.seed, r));
  }

  ComparisonReport report;
  report.architectures.resize(archs.size());
  for (std::size_t a = 0; a < archs.size(); ++a) {
    report.architectures[a].name = archs[a].prototype->name();
    report.architectures[a].rows.resize(cfg.num_runs);
  }

  // One job per (architecture, run); each writes only its own row.
  parallel_for(archs.size() * cfg.num_runs, cfg.threads, [&](std::size_t job) {
    const std::size_t a = job / cfg.num_runs;
    const std::size_t r = job % cfg.num_runs;
    const ArchitectureSetup& arch = archs[a];
    RunRow& row = report.architectures[a].rows[r];
    row.run_index = r;
    row.scenario = scenarios[r];

    PlantSpec run_plant = plant;
    run_plant.trajectory = scenarios[r].trajectory;
    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_final = cfg.t_final;
    sim.x0 = scenarios[r].x0;
    sim.theta0 = arch.theta0;
    sim.seed = cfg.seed;
    sim.skip_transient = cfg.skip_transient;

    std::ofstream csv;
    RecordSink sink;
    std::size_t counter = 0;
    if (!cfg.run_dir.empty()) {
      const auto path = cfg.run_dir / (report.architectures[a].name + "_run" +
                                       std::to_string(r) + ".csv");
      csv.open(path);
      if (!csv) throw IoError("compare: cannot open " + path.string());
      write_csv_header(csv);
      sink = [&](const StepRecord& rec) {
        if (counter++ % cfg.csv_stride == 0) write_csv_row(csv, rec);
      };
    }
    auto approx = arch.prototype->clone();
    try {
      const StreamResult res = run_streaming(sim, run_plant, arch.ctrl, *approx, sink);
      row.mean_e_norm = res.summary.mean_e_norm;
      row.mean_f_err_norm = res.summary.mean_f_err_norm;
      row.max_theta_norm = res.summary.max_theta_norm;
    } catch (const SimulationDiverged& e) {
      row.diverged = true;
      row.error = e.what();
    }
    if (csv.is_open()) {
      csv.close();
      if (!csv) throw IoError("compare: failed writing run log");
    }
  });

  for (ArchitectureStats& stats : report.architectures) {
    std::vector<double> e_vals;
    std::vector<double> f_vals;
    for (const RunRow& row : stats.rows) {
      if (row.diverged) {
        ++stats.diverged_runs;
        continue;
      }
      e_vals.push_back(row.mean_e_norm);
      f_vals.push_back(row.mean_f_err_norm);
    }
    stats.used_runs = e_vals.size();
    const MeanStd e = mean_std(e_vals);
    const MeanStd f = mean_std(f_vals);
    stats.mean_e_norm = e.mean;
    stats.std_e_norm = e.std;
    stats.mean_f_err_norm = f.mean;
    stats.std_f_err_norm = f.std;
  }
  return report;
}

}  // namespace lbkan
