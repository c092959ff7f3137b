#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "sbopt/harness.hpp"
#include "sbopt/tsplib.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitExternal = 4;

std::vector<std::string> parse_algos(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// "a:b:n" -> n log-spaced values in [a, b]
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> toks;
    std::string cur;
    for (const char c : spec) {
        if (c == ':') {
            toks.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    toks.push_back(cur);
    if (toks.size() != 3) throw sbopt::ConfigError("grid spec must be a:b:n, got '" + spec + "'");
    return sbopt::log_spaced(std::stod(toks[0]), std::stod(toks[1]),
                             static_cast<std::size_t>(std::stoul(toks[2])));
}

int run_command(const sbopt::ExperimentConfig& config) {
    auto result = sbopt::run_experiment(config);

    std::map<std::string, std::vector<sbopt::RunLog>> runs;
    std::vector<sbopt::AggregateSeries> aggs;
    for (auto& [name, sr] : result.by_strategy) {
        runs[name] = std::move(sr.runs);
        aggs.push_back(std::move(sr.aggregate));
        if (sr.warning)
            std::cerr << "warning: strategy " << name
                      << " had incomplete or failed runs; aggregates cover completed runs\n";
    }
    const std::filesystem::path out(config.output_dir);
    sbopt::write_runs_csv((out / "runs.csv").string(), runs);
    sbopt::write_aggregates_csv((out / "aggregates.csv").string(), aggs);

    int exit_code = kExitOk;
    for (const auto& [name, logs] : runs) {
        for (const auto& log : logs) {
            if (log.status == sbopt::RunStatus::numerical_failure) {
                std::cerr << "numerical failure in " << log.config_id << ": " << log.error << "\n";
                exit_code = kExitNumerical;
            } else if (log.status == sbopt::RunStatus::evaluation_failure) {
                std::cerr << "evaluation failure in " << log.config_id << ": " << log.error << "\n";
                exit_code = kExitExternal;
            }
        }
    }
    for (const auto& [name, logs] : runs) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& log : logs)
            if (!log.best_so_far.empty()) {
                sum += log.best_so_far.back();
                ++n;
            }
        if (n)
            std::cout << name << ": mean final best = " << sum / static_cast<double>(n) << " ("
                      << n << " runs)\n";
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate-based optimization benchmark for expensive discrete problems"};
    app.require_subcommand(1);

    sbopt::ExperimentConfig config;
    std::string algos = "gp,pl,dr,rs";
    bool budget_given = false;

    auto* run = app.add_subcommand("run", "Run an optimization experiment");
    run->add_option("--problem", config.problem_name, "rosenbrock|maxcut|tsp|external");
    run->add_option("--dim", config.dim, "problem dimension (nodes for maxcut)");
    run->add_option("--algo", algos, "comma-separated strategies: gp,pl,dr,rs");
    run->add_option("--budget", config.budget, "evaluation budget B")
        ->each([&](const std::string&) { budget_given = true; });
    run->add_option("--runs", config.repetitions, "repetitions R");
    run->add_option("--seed", config.master_seed, "master seed");
    run->add_option("--out", config.output_dir, "output directory")->required();
    run->add_flag("--binarize", config.binarize, "binary-encode the decision variables");
    run->add_flag("--shuffle", config.shuffle, "apply a fixed random variable permutation");
    run->add_option("--tsplib", config.tsplib_path, "TSPLIB .atsp instance file");
    run->add_option("--cmd", config.command_template,
                    "external command template with {x} placeholder");
    run->add_option("--timeout", config.external_timeout, "external command timeout (s)");
    run->add_option("--wall-clock", config.wall_clock_limit, "per-run wall clock limit (s)");
    run->add_option("--kappa", config.strategy_options.ucb_kappa, "UCB exploration weight");
    run->add_option("--pl-ridge", config.strategy_options.pl_ridge, "PL ridge parameter");
    run->add_option("--dr-gamma", config.strategy_options.dr_quantile,
                    "density-ratio good/bad split quantile");
    run->add_option("--dr-pseudo", config.strategy_options.dr_pseudo_count,
                    "density-ratio smoothing pseudo-count");
    run->add_option("--dr-pool", config.strategy_options.dr_candidate_pool,
                    "density-ratio candidate pool size");
    run->add_option("--jobs", config.parallelism, "worker threads (0 = all cores)");

    std::string logs_dir, eval_times = "10:1500:12", budgets = "100:10000:12";
    std::size_t ref_budget = 0;
    auto* sweep = app.add_subcommand("sweep", "Post-hoc time-budget analysis over saved runs");
    sweep->add_option("--logs", logs_dir, "directory containing runs.csv")->required();
    sweep->add_option("--eval-times", eval_times, "log-spaced grid a:b:n of evaluation times");
    sweep->add_option("--budgets", budgets, "log-spaced grid a:b:n of time budgets");
    sweep->add_option("--ref-budget", ref_budget,
                      "reference evaluation budget B (default: longest run)");

    std::size_t resolution = 100;
    auto* surface = app.add_subcommand("surface", "Export a fitted 2-d surrogate surface");
    surface->add_option("--problem", config.problem_name, "rosenbrock|maxcut|tsp|external");
    auto* surface_dim = surface->add_option("--dim", config.dim, "problem dimension (must be 2)");
    surface->add_option("--algo", algos, "single strategy to visualize");
    surface->add_option("--budget", config.budget, "evaluations per candidate run");
    surface->add_option("--runs", config.repetitions, "candidate runs to pick the best from");
    surface->add_option("--seed", config.master_seed, "master seed");
    surface->add_option("--resolution", resolution, "grid resolution per axis");
    surface->add_option("--out", config.output_dir, "output directory")->required();
    surface->add_option("--kappa", config.strategy_options.ucb_kappa, "UCB exploration weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            config.strategies = parse_algos(algos);
            if (!budget_given && config.problem_name == "external") config.budget = 100;
            return run_command(config);
        }
        if (sweep->parsed()) {
            const auto runs = sbopt::read_runs_csv(
                (std::filesystem::path(logs_dir) / "runs.csv").string());
            std::size_t budget = ref_budget;
            if (budget == 0)
                for (const auto& [name, logs] : runs)
                    for (const auto& log : logs) budget = std::max(budget, log.history.size());
            const auto result = sbopt::time_budget_sweep(runs, parse_grid(eval_times),
                                                         parse_grid(budgets), budget);
            if (!result.diagnostic.empty()) std::cerr << result.diagnostic << "\n";
            sbopt::write_sweep_csv(
                (std::filesystem::path(logs_dir) / "sweep.csv").string(), result);
            std::cout << "wrote " << result.cells.size() << " sweep cells\n";
            return kExitOk;
        }
        if (surface->parsed()) {
            config.strategies = parse_algos(algos);
            if (config.strategies.size() != 1)
                throw sbopt::ConfigError("surface: exactly one --algo required");
            if (surface_dim->count() == 0) config.dim = 2;
            if (config.budget == 500) config.budget = 50;   // paper-style defaults
            if (config.repetitions == 5) config.repetitions = 15;
            auto result = sbopt::run_experiment(config);
            const auto& sr = result.by_strategy.at(config.strategies[0]);

            // refit on the history of the best run
            const sbopt::RunLog* best = nullptr;
            for (const auto& log : sr.runs)
                if (!log.best_so_far.empty() &&
                    (!best || log.best_so_far.back() < best->best_so_far.back()))
                    best = &log;
            if (!best) throw sbopt::ConfigError("surface: no completed runs");
            auto problem = sbopt::make_problem(config);
            auto strategy = sbopt::make_strategy(config.strategies[0], problem->bounds(),
                                                 best->seed, config.strategy_options);
            strategy->fit(best->history);
            const auto grid = sbopt::surface_export(*strategy, problem->bounds(), resolution);
            sbopt::write_surface_csv(
                (std::filesystem::path(config.output_dir) / "surface.csv").string(), grid);
            std::cout << "wrote " << grid.rows.size() << " surface samples\n";
            return kExitOk;
        }
    } catch (const sbopt::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const sbopt::EvaluationFailure& e) {
        std::cerr << "evaluation failure: " << e.what() << "\n";
        return kExitExternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
