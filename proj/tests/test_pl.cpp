#include <doctest.h>

#include <cmath>
#include <functional>

#include "sbopt/pl.hpp"

using namespace sbopt;

namespace {

EvaluationHistory lattice_history(const Bounds& b, const std::function<double(const IntegerPoint&)>& f) {
    EvaluationHistory h;
    IntegerPoint x(b.dim());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == b.dim()) {
            h.append({x, f(x), 0.0, 0.0});
            return;
        }
        for (int v = b.lower(i); v <= b.upper(i); ++v) {
            x[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return h;
}

PlModel random_model(const Bounds& b, Rng& rng, double scale = 1.0) {
    PlBasis basis = PlBasis::build(b);
    Eigen::VectorXd w(static_cast<Eigen::Index>(basis.size()));
    std::normal_distribution<double> n(0.0, scale);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = n(rng);
    return PlModel::from_weights(std::move(basis), std::move(w));
}

}  // namespace

TEST_CASE("pl basis counts follow the knot construction") {
    // d=1, range {0,1,2}: three single-variable units plus the constant
    CHECK(PlBasis::build(Bounds({0}, {2})).size() == 4);
    // d=2 binary: 2*2 single + 3 pair knots + constant
    CHECK(PlBasis::build(Bounds({0, 0}, {1, 1})).size() == 8);
}

TEST_CASE("pl basis units have support of at most two adjacent variables") {
    const auto basis = PlBasis::build(Bounds({-2, 0, 1}, {2, 3, 4}));
    for (const auto& u : basis.units()) {
        if (u.i < 0) {
            CHECK(u.j < 0);  // constant
            continue;
        }
        if (u.j >= 0) CHECK(u.j == u.i + 1);
    }
}

TEST_CASE("pl fit reproduces a single observation as ridge vanishes") {
    EvaluationHistory h;
    h.append({{1, 2}, 7.5, 0.0, 0.0});
    const Bounds b({0, 0}, {3, 3});
    const auto m = PlModel::fit(h, PlBasis::build(b), 1e-8);
    CHECK(m.value({1.0, 2.0}) == doctest::Approx(7.5).epsilon(1e-6));
}

TEST_CASE("pl fit recovers a planted model given enough observations") {
    const Bounds b({0, 0}, {3, 3});
    Rng rng(13);
    const PlModel planted = random_model(b, rng);
    const auto h = lattice_history(b, [&](const IntegerPoint& x) {
        return planted.value(std::vector<double>(x.begin(), x.end()));
    });
    // 16 lattice observations, 16 basis units
    CHECK(h.size() >= PlBasis::build(b).size());
    const auto fitted = PlModel::fit(h, PlBasis::build(b), 1e-8);

    std::uniform_int_distribution<int> coord(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> x{static_cast<double>(coord(rng)),
                                    static_cast<double>(coord(rng))};
        CHECK(fitted.value(x) == doctest::Approx(planted.value(x)).epsilon(1e-4));
    }
}

TEST_CASE("pl fit shrinks to zero under a huge ridge") {
    const Bounds b({0}, {2});
    EvaluationHistory h;
    h.append({{0}, 5.0, 0.0, 0.0});
    h.append({{2}, -3.0, 0.0, 0.0});
    const auto m = PlModel::fit(h, PlBasis::build(b), 1e12);
    CHECK(std::abs(m.value({1.0})) < 1e-6);
    for (Eigen::Index i = 0; i < m.weights().size(); ++i)
        CHECK(std::abs(m.weights()(i)) < 1e-6);
}

TEST_CASE("pl fit rejects a non-positive ridge") {
    EvaluationHistory h;
    h.append({{0}, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(PlModel::fit(h, PlBasis::build(Bounds({0}, {2})), 0.0), ConfigError);
}

TEST_CASE("pl_suggest without exploration returns a planted integer minimum") {
    const Bounds b({0, 0}, {3, 3});
    const auto h = lattice_history(b, [](const IntegerPoint& x) {
        return std::pow(x[0] - 2.0, 2) + std::pow(x[1] - 1.0, 2);
    });
    const auto m = PlModel::fit(h, PlBasis::build(b), 1e-8);

    // oracle: exhaustive model evaluation over the box
    IntegerPoint best{0, 0};
    double best_f = 1e300;
    for (int a = 0; a <= 3; ++a)
        for (int c = 0; c <= 3; ++c) {
            const double f = m.value({static_cast<double>(a), static_cast<double>(c)});
            if (f < best_f) {
                best_f = f;
                best = {a, c};
            }
        }
    CHECK(best == IntegerPoint{2, 1});

    Rng rng(3);
    CHECK(pl_suggest(m, b, {0, 0}, 0.0, rng) == best);
    CHECK(pl_suggest(m, b, {3, 3}, 0.0, rng) == best);
}

TEST_CASE("pl_suggest with forced exploration moves by exactly one") {
    const Bounds b({0}, {4});
    const auto h = lattice_history(b, [](const IntegerPoint& x) {
        return std::pow(x[0] - 2.0, 2);
    });
    const auto m = PlModel::fit(h, PlBasis::build(b), 1e-8);
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = pl_suggest(m, b, {2}, 1.0, rng);
        CHECK(std::abs(x[0] - 2) == 1);  // minimizer is interior at 2
        CHECK(b.contains(x));
    }
}

TEST_CASE("pl_suggest stays within bounds under exploration") {
    const Bounds b({0, 0, 0}, {2, 2, 2});
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_model(b, rng);
        const auto x = pl_suggest(m, b, {0, 0, 0}, 1.0, rng);
        CHECK(b.contains(x));
    }
}

TEST_CASE("pl minima land on the integer lattice from continuous starts") {
    const Bounds b({-2, -2, -2}, {2, 2, 2});
    Rng rng(21);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int model_idx = 0; model_idx < 5; ++model_idx) {
        const auto m = random_model(b, rng);
        for (int start = 0; start < 10; ++start) {
            const std::vector<double> x0{u(rng), u(rng), u(rng)};
            const auto xmin = pl_minimize(m, b, x0);
            for (const double xi : xmin)
                CHECK(std::abs(xi - std::round(xi)) < 1e-6);
        }
    }
}

TEST_CASE("pl model is Lipschitz continuous") {
    const Bounds b({0, 0}, {3, 3});
    Rng rng(5);
    const auto m = random_model(b, rng);
    double lipschitz = 0.0;
    for (std::size_t k = 0; k < m.basis().size(); ++k) {
        const auto& unit = m.basis().units()[k];
        const double norm = unit.i < 0 ? 0.0 : (unit.j >= 0 ? std::sqrt(2.0) : 1.0);
        lipschitz += std::abs(m.weights()(static_cast<Eigen::Index>(k))) * norm;
    }
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> x{u(rng), u(rng)};
        const std::vector<double> y{u(rng), u(rng)};
        const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
        CHECK(std::abs(m.value(x) - m.value(y)) <= lipschitz * dist + 1e-12);
    }
}
