#include "sbopt/optimizer.hpp"

#include <chrono>

#include "sbopt/density_ratio.hpp"
#include "sbopt/gp.hpp"
#include "sbopt/pl.hpp"

namespace sbopt {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

RunLog run_optimization(Problem& problem, SurrogateStrategy& strategy,
                        const BudgetSpec& budget, std::uint64_t seed,
                        const std::string& config_id) {
    budget.validate();
    if (strategy.bounds().dim() != problem.bounds().dim())
        throw ConfigError("run_optimization: strategy and problem dimensions differ");

    strategy.reseed(derive_seed(seed, "strategy"));
    Rng init_rng(derive_seed(seed, "init"));
    Rng noise_rng(derive_seed(seed, "noise"));

    RunLog log;
    log.config_id = config_id;
    log.seed = seed;

    const std::size_t k = strategy.initial_design_size();
    const auto run_start = Clock::now();
    IntegerPoint next = uniform_sample(problem.bounds(), init_rng);

    for (std::size_t m = 0; m < budget.max_evaluations; ++m) {
        if (budget.wall_clock_limit > 0.0 && seconds_since(run_start) >= budget.wall_clock_limit)
            break;

        EvaluationRecord rec;
        rec.point = next;

        const auto eval_start = Clock::now();
        try {
            rec.observed = problem.evaluate(next, noise_rng);
        } catch (const EvaluationFailure& e) {
            log.status = RunStatus::evaluation_failure;
            log.error = e.what();
            break;
        }
        rec.eval_time = seconds_since(eval_start);

        log.history.append(std::move(rec));

        const auto model_start = Clock::now();
        bool failed = false;
        try {
            if (m + 1 < k) {
                next = uniform_sample(problem.bounds(), init_rng);
            } else {
                strategy.fit(log.history);
                next = strategy.suggest(log.history);
            }
        } catch (const NumericalFailure& e) {
            log.status = RunStatus::numerical_failure;
            log.error = e.what();
            failed = true;
        }
        log.history.records.back().model_time = seconds_since(model_start);
        if (failed) break;
    }

    if (!log.history.empty()) log.best_so_far = best_so_far(log.history);
    return log;
}

std::unique_ptr<SurrogateStrategy> make_strategy(const std::string& name, const Bounds& bounds,
                                                 std::uint64_t seed,
                                                 const StrategyOptions& options) {
    if (name == "gp") return std::make_unique<GpStrategy>(bounds, seed, options.ucb_kappa);
    if (name == "pl") return std::make_unique<PlStrategy>(bounds, seed, options.pl_ridge);
    if (name == "dr")
        return std::make_unique<DensityRatioStrategy>(bounds, seed, options.dr_quantile,
                                                      options.dr_pseudo_count,
                                                      options.dr_candidate_pool);
    if (name == "rs") return std::make_unique<RandomSearchStrategy>(bounds, seed);
    throw ConfigError("unknown strategy '" + name + "' (expected gp, pl, dr, rs)");
}

}  // namespace sbopt
