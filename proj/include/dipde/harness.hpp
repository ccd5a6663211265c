#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dipde/config.hpp"
#include "dipde/invariants.hpp"

namespace dipde {

/// Training and test trajectories of one run.
struct RunData {
    std::vector<TrajectoryGrid> train;
    std::vector<TrajectoryGrid> test;
};

/// IC seeds derive from (seed, run, k); noise is added to training data only.
RunData generate_run_data(const ExperimentConfig& cfg, int run);

/// Everything the regression needs that does not depend on data.
struct MethodSetup {
    Expr target;
    std::vector<Expr> features;
    std::vector<VectorField> generators;
    std::map<std::string, double> constants;
    Expr truth_equation;
    SparseModel truth;  // W* and M* on this feature ordering
};

MethodSetup method_setup(const ExperimentConfig& cfg);

/// Masks identical; throws RegressError if the feature lists differ.
bool success(const SparseModel& m, const SparseModel& truth);

struct RmseResult {
    std::optional<double> successful;  // nullopt when no run succeeded
    double all = 0.0;
};

RmseResult rmse(std::span<const SparseModel> runs, const SparseModel& truth);

struct LongTermSeries {
    Eigen::ArrayXd mse;  // per step, averaged over ICs; truncated at blow-up
    bool blew_up = false;
};

/// Integrates from each test IC for `steps` samples and compares with the
/// test trajectory.
LongTermSeries long_term_mse(const SparseModel& m, const std::map<std::string, double>& constants,
                             std::span<const TrajectoryGrid> tests, const SolverConfig& integrator, int steps);

/// Solver settings used for integrating discovered models.
SolverConfig integration_config(const ExperimentConfig& cfg);

struct RunResult {
    int run = 0;
    SparseModel model;
    bool success = false;
    double error_norm = 0.0;  // |W - W*|
    Eigen::Index rows = 0;
    Eigen::Index dropped = 0;
    std::optional<std::string> failure;
    std::optional<LongTermSeries> long_term;
    std::optional<LongTermSeries> long_term_truth;
};

/// Fit one run on prepared data.
RunResult run_one(const ExperimentConfig& cfg, const MethodSetup& setup, const RunData& data, int run);

struct DiscoveryReport {
    ExperimentConfig config;
    SparseModel truth;
    std::vector<RunResult> runs;
    double success_rate = 0.0;
    RmseResult rmse;
    std::string config_hash;
};

/// Worker count from DIPDE_WORKERS (default: hardware concurrency).
int worker_count();

/// Runs are distributed over a worker pool; results are ordered by run
/// index so the report does not depend on the worker count. `data`, when
/// given, supplies the trajectories of each run instead of solving.
DiscoveryReport run_experiment(const ExperimentConfig& cfg, const std::vector<RunData>* data = nullptr,
                               int workers = 0);

/// config.json, runs.csv, summary.csv, models/run_<r>.json and, with
/// long-term data, long_term.csv and long_term.svg.
void write_report(const DiscoveryReport& r, const std::string& dir);

/// Aggregate row recomputed from runs.csv (used by `report`).
struct SummaryRow {
    std::string system;
    std::string method;
    double lambda = 0.0;
    int runs = 0;
    double success_rate = 0.0;
    std::optional<double> rmse_successful;
    double rmse_all = 0.0;
};

SummaryRow summarize(const DiscoveryReport& r);
SummaryRow summarize_runs_csv(const std::string& path, const std::string& system, const std::string& method,
                              double lambda);
std::string summary_csv_header();
std::string summary_csv_row(const SummaryRow& s);
/// Plain-text table: method, success rate, RMSE (successful), RMSE (all).
std::string render_table(std::span<const SummaryRow> rows);

}  // namespace dipde
