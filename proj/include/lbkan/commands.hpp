#pragma once

#include <memory>
#include <string>

#include "lbkan/approximator.hpp"
#include "lbkan/config.hpp"
#include "lbkan/experiments.hpp"
#include "lbkan/kan.hpp"
#include "lbkan/mlp.hpp"

namespace lbkan {

KanShape make_kan_shape(const RunConfig& cfg);
MlpShape make_mlp_shape(const RunConfig& cfg);

// Approximator prototype and gains for one architecture (gamma_dnn replaces
// gamma for the DNN).
ArchitectureSetup make_architecture(const RunConfig& cfg, ApproximatorKind kind);

// Subcommands. Each writes into cfg.out_dir through a staging directory that
// is discarded on failure, and echoes the resolved configuration to
// config.json.
//   run       -> run.csv, summary.json, theta_final.csv
//   mc-init   -> theta0.csv, theta0.bin, mc_costs.csv, mc_summary.json
//   compare   -> report.json, runs/<arch>_run<i>.csv, theta0_<arch>.csv
//   decompose -> edge_l{l}_j{j}_i{i}.csv (eta,phi_value), one per edge
void run_command(const RunConfig& cfg);
void mc_init_command(const RunConfig& cfg);
void compare_command(const RunConfig& cfg);
void decompose_command(const RunConfig& cfg);

// Dispatches on the subcommand name; throws UsageError for unknown names.
void dispatch(const std::string& command, const RunConfig& cfg);

}  // namespace lbkan
