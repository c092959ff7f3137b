#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sbopt/core.hpp"

namespace sbopt {

/// Tunables shared by the strategy factory; each strategy reads its own subset.
struct StrategyOptions {
    double ucb_kappa = 2.576;
    double pl_ridge = 1e-3;
    double dr_quantile = 0.25;
    double dr_pseudo_count = 1.0;
    int dr_candidate_pool = 24;
};

/// One surrogate model plus its acquisition rule. fit() is called once per
/// iteration with the full history; suggest() proposes the next feasible
/// integer point. Before initial_design_size() observations exist, suggest()
/// falls back to a uniform sample.
class SurrogateStrategy {
public:
    explicit SurrogateStrategy(Bounds bounds, std::uint64_t seed)
        : bounds_(std::move(bounds)), rng_(seed) {}
    virtual ~SurrogateStrategy() = default;

    virtual std::string name() const = 0;
    virtual std::size_t initial_design_size() const = 0;
    virtual void fit(const EvaluationHistory& history) = 0;
    virtual IntegerPoint suggest(const EvaluationHistory& history) = 0;

    /// Continuous model value at x, for surface export. Empty when the
    /// strategy has no pointwise model (random search, density ratio).
    virtual std::optional<double> model_value(const std::vector<double>& x) const {
        (void)x;
        return std::nullopt;
    }

    const Bounds& bounds() const { return bounds_; }
    void reseed(std::uint64_t seed) { rng_.seed(seed); }

protected:
    Bounds bounds_;
    Rng rng_;
};

class RandomSearchStrategy final : public SurrogateStrategy {
public:
    using SurrogateStrategy::SurrogateStrategy;

    std::string name() const override { return "rs"; }
    std::size_t initial_design_size() const override { return 1; }
    void fit(const EvaluationHistory&) override {}
    IntegerPoint suggest(const EvaluationHistory&) override {
        return uniform_sample(bounds_, rng_);
    }
};

std::unique_ptr<SurrogateStrategy> make_strategy(const std::string& name, const Bounds& bounds,
                                                 std::uint64_t seed,
                                                 const StrategyOptions& options = {});

}  // namespace sbopt
