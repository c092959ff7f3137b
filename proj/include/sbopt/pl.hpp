#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sbopt/core.hpp"
#include "sbopt/strategy.hpp"

namespace sbopt {

/// One basis unit max(0, a.x + b) where a is either zero (constant unit,
/// value 1), a single +1 entry, or +1 on two adjacent variables.
struct ReluUnit {
    int i = -1;      // first variable, -1 for the constant unit
    int j = -1;      // adjacent partner, -1 when single-variable
    int offset = 0;  // b

    double value(const std::vector<double>& x) const {
        if (i < 0) return 1.0;
        double s = x[static_cast<std::size_t>(i)] + offset;
        if (j >= 0) s += x[static_cast<std::size_t>(j)];
        return s > 0.0 ? s : 0.0;
    }
};

/// Integer-knot ReLU basis: one unit per integer knot per variable, one per
/// integer knot per adjacent variable pair, plus a constant unit.
class PlBasis {
public:
    static PlBasis build(const Bounds& bounds);

    std::size_t size() const { return units_.size(); }
    const std::vector<ReluUnit>& units() const { return units_; }

private:
    std::vector<ReluUnit> units_;
};

class PlModel {
public:
    /// Ridge-regularized least squares on raw targets.
    static PlModel fit(const EvaluationHistory& history, PlBasis basis, double ridge);

    static PlModel from_weights(PlBasis basis, Eigen::VectorXd weights);

    double value(const std::vector<double>& x) const;
    const PlBasis& basis() const { return basis_; }
    const Eigen::VectorXd& weights() const { return weights_; }

private:
    PlBasis basis_;
    Eigen::VectorXd weights_;
};

/// Minimizes the model over the continuous box by exact line minimization
/// over piecewise-linear breakpoints, cycling coordinate and adjacent-pair
/// directions. Converged minima land on the integer lattice.
std::vector<double> pl_minimize(const PlModel& model, const Bounds& bounds,
                                std::vector<double> start);

/// Acquisition step: minimize the model from best_point, then perturb each
/// coordinate by +-1 with probability p_explore, clamped to the box.
IntegerPoint pl_suggest(const PlModel& model, const Bounds& bounds,
                        const IntegerPoint& best_point, double p_explore, Rng& rng);

class PlStrategy final : public SurrogateStrategy {
public:
    PlStrategy(Bounds bounds, std::uint64_t seed, double ridge = 1e-3);

    std::string name() const override { return "pl"; }
    std::size_t initial_design_size() const override { return 5; }
    void fit(const EvaluationHistory& history) override;
    IntegerPoint suggest(const EvaluationHistory& history) override;
    std::optional<double> model_value(const std::vector<double>& x) const override;

    const PlModel* model() const { return model_ ? &*model_ : nullptr; }

private:
    double ridge_;
    PlBasis basis_;
    std::optional<PlModel> model_;
};

}  // namespace sbopt
