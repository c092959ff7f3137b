#include "sbopt/pl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sbopt {

PlBasis PlBasis::build(const Bounds& bounds) {
    PlBasis b;
    const int d = static_cast<int>(bounds.dim());
    for (int i = 0; i < d; ++i)
        for (int z = bounds.lower(i); z <= bounds.upper(i); ++z)
            b.units_.push_back({i, -1, -z});
    for (int i = 0; i + 1 < d; ++i) {
        const int lo = bounds.lower(i) + bounds.lower(i + 1);
        const int hi = bounds.upper(i) + bounds.upper(i + 1);
        for (int z = lo; z <= hi; ++z) b.units_.push_back({i, i + 1, -z});
    }
    b.units_.push_back({});  // constant
    return b;
}

PlModel PlModel::fit(const EvaluationHistory& history, PlBasis basis, double ridge) {
    if (history.empty()) throw ConfigError("pl fit: empty history");
    if (ridge <= 0.0) throw ConfigError("pl fit: ridge must be positive");
    const auto n = static_cast<Eigen::Index>(history.size());
    const auto k = static_cast<Eigen::Index>(basis.size());

    Eigen::MatrixXd phi(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const auto& p = history.records[m].point;
        std::vector<double> x(p.begin(), p.end());
        for (Eigen::Index u = 0; u < k; ++u) phi(m, u) = basis.units()[u].value(x);
        y(m) = history.records[m].observed;
    }

    PlModel m;
    m.basis_ = std::move(basis);
    if (k <= n) {
        Eigen::MatrixXd G = phi.transpose() * phi;
        G.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
        if (ldlt.info() != Eigen::Success)
            throw NumericalFailure("pl fit: normal equations not positive definite");
        m.weights_ = ldlt.solve(phi.transpose() * y);
    } else {
        // Dual form of the same ridge solution: w = phi^T (phi phi^T + l I)^-1 y
        // keeps the solve at n x n when the basis outnumbers the observations.
        Eigen::MatrixXd G = phi * phi.transpose();
        G.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
        if (ldlt.info() != Eigen::Success)
            throw NumericalFailure("pl fit: dual system not positive definite");
        m.weights_ = phi.transpose() * ldlt.solve(y);
    }
    return m;
}

PlModel PlModel::from_weights(PlBasis basis, Eigen::VectorXd weights) {
    if (static_cast<std::size_t>(weights.size()) != basis.size())
        throw ConfigError("pl: weight count does not match basis size");
    PlModel m;
    m.basis_ = std::move(basis);
    m.weights_ = std::move(weights);
    return m;
}

double PlModel::value(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t u = 0; u < basis_.size(); ++u)
        s += weights_(static_cast<Eigen::Index>(u)) * basis_.units()[u].value(x);
    return s;
}

namespace {

/// Exact minimization of the model along x + t * v where v has entries in
/// {-1, 0, +1}. The restriction is piecewise linear in t, so the minimum is
/// attained at a kink or at the feasible interval's ends.
bool line_minimize(const PlModel& model, const Bounds& bounds, std::vector<double>& x,
                   const std::vector<int>& v, double& fx) {
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (v[i] == 0) continue;
        const double a = (bounds.lower(i) - x[i]) / v[i];
        const double b = (bounds.upper(i) - x[i]) / v[i];
        t_lo = std::max(t_lo, std::min(a, b));
        t_hi = std::min(t_hi, std::max(a, b));
    }
    if (!(t_lo <= t_hi)) return false;

    std::vector<double> ts{t_lo, t_hi, 0.0};
    for (const auto& u : model.basis().units()) {
        if (u.i < 0) continue;
        int denom = v[static_cast<std::size_t>(u.i)];
        double val = x[static_cast<std::size_t>(u.i)] + u.offset;
        if (u.j >= 0) {
            denom += v[static_cast<std::size_t>(u.j)];
            val += x[static_cast<std::size_t>(u.j)];
        }
        if (denom == 0) continue;
        const double t = -val / denom;
        if (t > t_lo && t < t_hi) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());

    double best_t = 0.0;
    double best_f = fx;
    std::vector<double> probe(x);
    for (const double t : ts) {
        for (std::size_t i = 0; i < x.size(); ++i) probe[i] = x[i] + t * v[i];
        const double f = model.value(probe);
        if (f < best_f - 1e-12 * (1.0 + std::abs(best_f))) {
            best_f = f;
            best_t = t;
        }
    }
    if (best_t == 0.0) return false;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += best_t * v[i];
    fx = best_f;
    return true;
}

bool near_integer(const std::vector<double>& x, double tol) {
    for (const double xi : x)
        if (std::abs(xi - std::round(xi)) > tol) return false;
    return true;
}

}  // namespace

std::vector<double> pl_minimize(const PlModel& model, const Bounds& bounds,
                                std::vector<double> start) {
    const std::size_t d = bounds.dim();
    std::vector<double> x(std::move(start));
    for (std::size_t i = 0; i < d; ++i)
        x[i] = std::clamp(x[i], static_cast<double>(bounds.lower(i)),
                          static_cast<double>(bounds.upper(i)));
    double fx = model.value(x);
    std::vector<int> v(d, 0);

    for (int sweep = 0; sweep < 200; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < d; ++i) {
            std::fill(v.begin(), v.end(), 0);
            v[i] = 1;
            moved |= line_minimize(model, bounds, x, v, fx);
        }
        // Diagonal moves along active pair kinks: x_i + x_{i+1} constant.
        for (std::size_t i = 0; i + 1 < d; ++i) {
            std::fill(v.begin(), v.end(), 0);
            v[i] = 1;
            v[i + 1] = -1;
            moved |= line_minimize(model, bounds, x, v, fx);
        }
        if (!moved) {
            if (near_integer(x, 1e-9)) break;
            // Alternating-sign windows free longer chains of active pair kinks.
            bool escaped = false;
            for (std::size_t len = 3; len <= d && !escaped; ++len) {
                for (std::size_t i = 0; i + len <= d && !escaped; ++i) {
                    std::fill(v.begin(), v.end(), 0);
                    for (std::size_t off = 0; off < len; ++off)
                        v[i + off] = (off % 2 == 0) ? 1 : -1;
                    escaped = line_minimize(model, bounds, x, v, fx);
                }
            }
            if (!escaped) break;
        }
    }
    return x;
}

IntegerPoint pl_suggest(const PlModel& model, const Bounds& bounds,
                        const IntegerPoint& best_point, double p_explore, Rng& rng) {
    std::vector<double> start(best_point.begin(), best_point.end());
    const std::vector<double> xmin = pl_minimize(model, bounds, std::move(start));

    IntegerPoint out(bounds.dim());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<int>(std::lround(xmin[i]));
    out = bounds.clamp(out);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (u(rng) < p_explore) {
            const int dir = (u(rng) < 0.5) ? -1 : 1;
            out[i] = std::clamp(out[i] + dir, bounds.lower(i), bounds.upper(i));
        }
    }
    return out;
}

PlStrategy::PlStrategy(Bounds bounds, std::uint64_t seed, double ridge)
    : SurrogateStrategy(std::move(bounds), seed),
      ridge_(ridge),
      basis_(PlBasis::build(bounds_)) {}

void PlStrategy::fit(const EvaluationHistory& history) {
    if (history.empty()) return;
    model_ = PlModel::fit(history, basis_, ridge_);
}

IntegerPoint PlStrategy::suggest(const EvaluationHistory& history) {
    if (history.size() < initial_design_size() || !model_)
        return uniform_sample(bounds_, rng_);
    const auto& best = history.records[history.best_index()].point;
    const double p_explore = 1.0 / static_cast<double>(bounds_.dim());
    return pl_suggest(*model_, bounds_, best, p_explore, rng_);
}

std::optional<double> PlStrategy::model_value(const std::vector<double>& x) const {
    if (!model_) return std::nullopt;
    return model_->value(x);
}

}  // namespace sbopt
