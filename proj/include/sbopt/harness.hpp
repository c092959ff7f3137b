#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sbopt/core.hpp"
#include "sbopt/optimizer.hpp"
#include "sbopt/problems.hpp"
#include "sbopt/strategy.hpp"

namespace sbopt {

struct ExperimentConfig {
    std::string problem_name = "rosenbrock";  // rosenbrock | maxcut | tsp | external
    std::size_t dim = 49;
    std::vector<std::string> strategies = {"gp", "pl", "dr", "rs"};
    std::size_t budget = 500;
    std::size_t repetitions = 5;
    std::uint64_t master_seed = 42;
    std::string output_dir;
    bool binarize = false;
    bool shuffle = false;
    std::string tsplib_path;
    std::string command_template;
    double external_timeout = 600.0;
    double maxcut_edge_probability = 0.5;
    double maxcut_max_weight = 10.0;
    double wall_clock_limit = 0.0;
    unsigned parallelism = 0;  // 0 = hardware concurrency
    StrategyOptions strategy_options;

    void validate() const;
};

std::shared_ptr<Problem> make_problem(const ExperimentConfig& config);

struct AggregateSeries {
    std::string strategy;
    std::vector<double> mean_best;
    std::vector<double> std_best;
    std::vector<double> mean_cum_model_time;
};

struct StrategyResult {
    std::vector<RunLog> runs;
    AggregateSeries aggregate;
    bool warning = false;  // some run failed or stopped early
};

struct ExperimentResult {
    std::map<std::string, StrategyResult> by_strategy;
};

/// R runs per strategy with seeds derived from (master, strategy, run index);
/// aggregation proceeds over completed runs.
ExperimentResult run_experiment(const ExperimentConfig& config);

AggregateSeries aggregate_runs(const std::string& strategy, const std::vector<RunLog>& runs,
                               std::size_t budget);

// ---------------------------------------------------------------------------
// Post-hoc time-budget sweep
// ---------------------------------------------------------------------------

struct SweepCell {
    double eval_time = 0.0;
    double time_budget = 0.0;
    std::string winner;
    double winner_mean = 0.0;
    bool valid = false;
    bool tie = false;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::string diagnostic;
};

/// Number of iterations m such that the cumulative model time plus m times
/// the artificial evaluation time fits in the time budget.
std::size_t affordable_iterations(const std::vector<double>& model_times, double eval_time,
                                  double time_budget);

SweepResult time_budget_sweep(const std::map<std::string, std::vector<RunLog>>& logs,
                              const std::vector<double>& eval_time_grid,
                              const std::vector<double>& budget_grid,
                              std::size_t reference_budget);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// ---------------------------------------------------------------------------
// Surface export
// ---------------------------------------------------------------------------

struct SurfaceGrid {
    std::vector<std::array<double, 3>> rows;  // x1, x2, model value
};

/// Samples the strategy's continuous model on a (resolution+1)^2 grid over a
/// 2-d box.
SurfaceGrid surface_export(const SurrogateStrategy& strategy, const Bounds& bounds,
                           std::size_t resolution);

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

void write_runs_csv(const std::string& path,
                    const std::map<std::string, std::vector<RunLog>>& runs);
std::map<std::string, std::vector<RunLog>> read_runs_csv(const std::string& path);

void write_aggregates_csv(const std::string& path, const std::vector<AggregateSeries>& series);
std::vector<AggregateSeries> read_aggregates_csv(const std::string& path);

void write_sweep_csv(const std::string& path, const SweepResult& sweep);
void write_surface_csv(const std::string& path, const SurfaceGrid& grid);

}  // namespace sbopt
