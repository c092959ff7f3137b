#include "sbopt/density_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sbopt {

DensityRatioModel::DensityRatioModel(const Bounds& bounds, double quantile,
                                     double pseudo_count)
    : bounds_(&bounds), quantile_(quantile), pseudo_count_(pseudo_count) {
    if (quantile <= 0.0 || quantile >= 1.0)
        throw ConfigError("density ratio: quantile must be in (0,1)");
    if (pseudo_count < 0.0) throw ConfigError("density ratio: negative pseudo count");
    const std::size_t d = bounds.dim();
    good_counts_.resize(d);
    bad_counts_.resize(d);
    good_totals_.assign(d, 0.0);
    bad_totals_.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        good_counts_[i].assign(static_cast<std::size_t>(bounds.width(i)) + 1, 0.0);
        bad_counts_[i].assign(static_cast<std::size_t>(bounds.width(i)) + 1, 0.0);
    }
}

void DensityRatioModel::fit(const EvaluationHistory& history) {
    if (history.empty()) throw ConfigError("density ratio fit: empty history");
    const std::size_t m = history.size();

    // Good set: the floor(gamma*m) lowest observations, at least one,
    // earliest record wins ties.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return history.records[a].observed < history.records[b].observed;
    });
    const std::size_t n_good = std::max<std::size_t>(
        1, static_cast<std::size_t>(quantile_ * static_cast<double>(m)));

    const std::size_t d = bounds_->dim();
    for (std::size_t i = 0; i < d; ++i) {
        std::fill(good_counts_[i].begin(), good_counts_[i].end(), 0.0);
        std::fill(bad_counts_[i].begin(), bad_counts_[i].end(), 0.0);
    }
    for (std::size_t rank = 0; rank < m; ++rank) {
        const auto& pt = history.records[order[rank]].point;
        auto& counts = rank < n_good ? good_counts_ : bad_counts_;
        for (std::size_t i = 0; i < d; ++i) {
            const int idx = pt[i] - bounds_->lower(i);
            if (idx >= 0 && idx < static_cast<int>(counts[i].size()))
                counts[i][static_cast<std::size_t>(idx)] += 1.0;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        const double cells = static_cast<double>(good_counts_[i].size());
        good_totals_[i] = std::accumulate(good_counts_[i].begin(), good_counts_[i].end(), 0.0) +
                          pseudo_count_ * cells;
        bad_totals_[i] = std::accumulate(bad_counts_[i].begin(), bad_counts_[i].end(), 0.0) +
                         pseudo_count_ * cells;
    }
}

double DensityRatioModel::good_density(std::size_t i, int v) const {
    const int idx = v - bounds_->lower(i);
    return (good_counts_[i][static_cast<std::size_t>(idx)] + pseudo_count_) / good_totals_[i];
}

double DensityRatioModel::bad_density(std::size_t i, int v) const {
    const int idx = v - bounds_->lower(i);
    return (bad_counts_[i][static_cast<std::size_t>(idx)] + pseudo_count_) / bad_totals_[i];
}

double DensityRatioModel::score(const IntegerPoint& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < bounds_->dim(); ++i)
        s += std::log(good_density(i, x[i])) - std::log(bad_density(i, x[i]));
    return s;
}

IntegerPoint DensityRatioModel::sample_good(Rng& rng) const {
    const std::size_t d = bounds_->dim();
    IntegerPoint x(d);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double r = u(rng);
        double acc = 0.0;
        int v = bounds_->lower(i);
        for (int c = bounds_->lower(i); c <= bounds_->upper(i); ++c) {
            acc += good_density(i, c);
            v = c;
            if (r < acc) break;
        }
        x[i] = v;
    }
    return x;
}

IntegerPoint density_ratio_suggest(const EvaluationHistory& history,
                                   const DensityRatioModel& model, const Bounds& bounds,
                                   int candidate_pool, Rng& rng) {
    (void)history;
    (void)bounds;
    IntegerPoint best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidate_pool; ++c) {
        IntegerPoint cand = model.sample_good(rng);
        const double s = model.score(cand);
        if (s > best_score) {
            best_score = s;
            best = std::move(cand);
        }
    }
    return best;
}

DensityRatioStrategy::DensityRatioStrategy(Bounds bounds, std::uint64_t seed, double quantile,
                                           double pseudo_count, int candidate_pool)
    : SurrogateStrategy(std::move(bounds), seed),
      candidate_pool_(candidate_pool),
      model_(bounds_, quantile, pseudo_count) {}

void DensityRatioStrategy::fit(const EvaluationHistory& history) {
    if (history.empty()) return;
    model_.fit(history);
    fitted_ = true;
}

IntegerPoint DensityRatioStrategy::suggest(const EvaluationHistory& history) {
    if (history.size() < initial_design_size() || !fitted_)
        return uniform_sample(bounds_, rng_);
    return density_ratio_suggest(history, model_, bounds_, candidate_pool_, rng_);
}

}  // namespace sbopt
