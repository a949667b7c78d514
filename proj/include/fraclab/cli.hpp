#pragma once

#include "fraclab/lemmas.hpp"
#include "fraclab/manifold.hpp"
#include "fraclab/solver.hpp"
#include "fraclab/spectral_operator.hpp"
#include "fraclab/weight.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fraclab {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

struct RunConfig {
    Json raw;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

struct ManifoldBlock {
    int n = 2;
    WarpingSpec warping = WarpingSpec::flat();
    double r_max = 200.0;
    int nodes = 512;
    GridSpec grid{GridKind::graded, 1.0};
    AssumptionThresholds thresholds;
};

struct OperatorBlock {
    OuterBoundary bc = OuterBoundary::dirichlet;
    QuadratureRule rule = QuadratureRule::gauss_legendre_log;
    int panels = 200;
    double s_min_factor = 1e-6;
    double s_max_factor = 1e6;
    bool end_corrections = true;
};

struct WeightBlock {
    double alpha = 1.0;
    /// Empty means automatic selection.
    std::optional<double> N;
    double n_threshold = 0.75;
    std::vector<double> t_values{0.25, 1.0, 4.0, 16.0};
    double spread_tolerance = 3.0;
    std::vector<double> gold_t_values{0.5, 1.0, 2.0};
    double gold_tolerance = 1e-3;
    std::vector<double> norm_T_values;
    double norm_tolerance = 0.05;
};

struct SimulationBlock {
    SimulationParams params;
    /// Target ∫ f₀ dμ; overrides amplitude when present.
    std::optional<double> mass;
    double amplitude = 1.0;
    double radius = 1.0;
};

struct LemmaCaseBlock {
    double gamma = 0.0;
    double alpha = 1.0;
    std::vector<double> scales;
};

struct LemmasBlock {
    std::vector<double> minwedge_y;
    std::vector<LemmaCaseBlock> case1, case2, case3;
    double tolerance = 0.05;
};

struct LifespanBlock {
    double N = 4.0;
    double phi0 = 1.0;
    std::optional<double> C;
};

struct SweepBlock {
    std::string command;
    std::vector<std::pair<std::string, std::vector<Json>>> grid;
};

ManifoldBlock manifold_block(const RunConfig& cfg);
OperatorBlock operator_block(const RunConfig& cfg);
WeightBlock weight_block(const RunConfig& cfg);
NonlinearitySpec nonlinearity_block(const RunConfig& cfg);
SimulationBlock simulation_block(const RunConfig& cfg);
LemmasBlock lemmas_block(const RunConfig& cfg, const ManifoldBlock& mb, const WeightBlock& wb);
LifespanBlock lifespan_block(const RunConfig& cfg);
SweepBlock sweep_block(const RunConfig& cfg);

std::shared_ptr<const ManifoldModel> build_model(const ManifoldBlock& mb);

/// Outcome of one subcommand; `files` maps output names (e.g. series.csv) to contents.
struct CommandResult {
    int exit_code = 0;
    Json report;
    std::map<std::string, std::string> files;
};

CommandResult cmd_check_manifold(const RunConfig& cfg);
CommandResult cmd_verify_lemmas(const RunConfig& cfg);
CommandResult cmd_verify_weight(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_lifespan(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);

/// Dispatch by subcommand name; library and config errors become exit 2 reports.
CommandResult run_command(const std::string& command, const RunConfig& cfg);

/// Writes report.json and every extra file into `out`.
void write_outputs(const CommandResult& result, const std::filesystem::path& out);

/// Canonical text of a report (2-space indent, trailing newline).
std::string dump_report(const Json& report);

/// Worker count for sweeps: FRACLAB_THREADS if set, else hardware concurrency.
unsigned sweep_threads();

}  // namespace fraclab
