#pragma once

#include "sbopt/core.hpp"
#include "sbopt/problems.hpp"
#include "sbopt/strategy.hpp"

namespace sbopt {

/// Runs the sequential surrogate-based optimization loop: evaluate, record,
/// refit, suggest. The first initial_design_size() points come from the
/// initial-design RNG stream; the seed fully determines the initial design,
/// the strategy stream, and the problem noise stream.
RunLog run_optimization(Problem& problem, SurrogateStrategy& strategy,
                        const BudgetSpec& budget, std::uint64_t seed,
                        const std::string& config_id = "");

}  // namespace sbopt
