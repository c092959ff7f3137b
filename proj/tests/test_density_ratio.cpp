#include <doctest.h>

#include "sbopt/density_ratio.hpp"

using namespace sbopt;

TEST_CASE("density ratio rejects bad configuration") {
    const Bounds b({0}, {3});
    CHECK_THROWS_AS(DensityRatioModel(b, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(DensityRatioModel(b, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(DensityRatioModel(b, 0.25, -1.0), ConfigError);
}

TEST_CASE("densities are normalized after smoothing") {
    const Bounds b({0, -1}, {3, 1});
    DensityRatioModel m(b, 0.25, 1.0);
    EvaluationHistory h;
    h.append({{0, 0}, 1.0, 0.0, 0.0});
    h.append({{1, 1}, 2.0, 0.0, 0.0});
    h.append({{3, -1}, 3.0, 0.0, 0.0});
    h.append({{2, 0}, 4.0, 0.0, 0.0});
    m.fit(h);
    for (std::size_t i = 0; i < 2; ++i) {
        double g = 0.0, bad = 0.0;
        for (int v = b.lower(i); v <= b.upper(i); ++v) {
            g += m.good_density(i, v);
            bad += m.bad_density(i, v);
        }
        CHECK(g == doctest::Approx(1.0));
        CHECK(bad == doctest::Approx(1.0));
    }
}

TEST_CASE("degenerate split with equal observations still yields feasible points") {
    const Bounds b({0}, {4});
    DensityRatioModel m(b, 0.25, 1.0);
    EvaluationHistory h;
    for (int i = 0; i < 8; ++i) h.append({{i % 5}, 1.0, 0.0, 0.0});
    m.fit(h);
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = density_ratio_suggest(h, m, b, 24, rng);
        CHECK(b.contains(x));
    }
}

TEST_CASE("concentrated good set dominates the suggestion") {
    // good observations all at value 2, smoothing nearly off
    const Bounds b({0}, {4});
    DensityRatioModel m(b, 0.25, 1e-6);
    EvaluationHistory h;
    for (int i = 0; i < 5; ++i) h.append({{2}, 0.0, 0.0, 0.0});
    for (int i = 0; i < 15; ++i) h.append({{(i * 7) % 5}, 10.0 + i, 0.0, 0.0});
    m.fit(h);
    Rng rng(9);
    int hits = 0;
    for (int trial = 0; trial < 1000; ++trial)
        if (density_ratio_suggest(h, m, b, 24, rng)[0] == 2) ++hits;
    CHECK(hits >= 900);
}

TEST_CASE("strategy falls back to uniform before its initial design") {
    const Bounds b({0, 0}, {5, 5});
    DensityRatioStrategy s(b, 7);
    EvaluationHistory h;
    h.append({{1, 1}, 0.0, 0.0, 0.0});
    CHECK(b.contains(s.suggest(h)));
    CHECK(s.initial_design_size() == 3);
}
