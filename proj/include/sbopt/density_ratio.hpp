#pragma once

#include <optional>
#include <vector>

#include "sbopt/core.hpp"
#include "sbopt/strategy.hpp"

namespace sbopt {

/// Per-dimension categorical density-ratio baseline: the history is split at
/// the gamma-quantile of observed values into good and bad sets, each
/// dimension gets smoothed categorical densities over its integer range, and
/// candidates sampled from the good density are ranked by the summed
/// log-density ratio.
class DensityRatioModel {
public:
    DensityRatioModel(const Bounds& bounds, double quantile, double pseudo_count);

    void fit(const EvaluationHistory& history);

    /// Smoothed probability of value v in dimension i.
    double good_density(std::size_t i, int v) const;
    double bad_density(std::size_t i, int v) const;

    double score(const IntegerPoint& x) const;
    IntegerPoint sample_good(Rng& rng) const;

private:
    const Bounds* bounds_;
    double quantile_;
    double pseudo_count_;
    std::vector<std::vector<double>> good_counts_;  // per dim, per value
    std::vector<std::vector<double>> bad_counts_;
    std::vector<double> good_totals_;
    std::vector<double> bad_totals_;
};

IntegerPoint density_ratio_suggest(const EvaluationHistory& history,
                                   const DensityRatioModel& model, const Bounds& bounds,
                                   int candidate_pool, Rng& rng);

class DensityRatioStrategy final : public SurrogateStrategy {
public:
    DensityRatioStrategy(Bounds bounds, std::uint64_t seed, double quantile = 0.25,
                         double pseudo_count = 1.0, int candidate_pool = 24);

    std::string name() const override { return "dr"; }
    std::size_t initial_design_size() const override { return 3; }
    void fit(const EvaluationHistory& history) override;
    IntegerPoint suggest(const EvaluationHistory& history) override;

private:
    int candidate_pool_;
    DensityRatioModel model_;
    bool fitted_ = false;
};

}  // namespace sbopt
