#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sbopt/gp.hpp"

using namespace sbopt;

namespace {

EvaluationHistory make_history(const std::vector<IntegerPoint>& xs,
                               const std::vector<double>& ys) {
    EvaluationHistory h;
    for (std::size_t i = 0; i < xs.size(); ++i) h.append({xs[i], ys[i], 0.0, 0.0});
    return h;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double d : v) x(i++) = d;
    return x;
}

}  // namespace

TEST_CASE("matern52 closed form") {
    CHECK(matern52(0.0, 3.0, 2.5) == doctest::Approx(2.5));
    // (1 + sqrt5 + 5/3) * exp(-sqrt5)
    CHECK(matern52(1.0, 1.0, 1.0) == doctest::Approx(0.52399).epsilon(1e-4));
    CHECK(matern52(2.0, 1.0, 1.0) < matern52(1.0, 1.0, 1.0));
    CHECK_THROWS_AS(matern52(std::nan(""), 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(matern52(1.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(matern52(-1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("gp interpolates a single noiseless point") {
    const auto h = make_history({{0}}, {3.0});
    const auto m = GpModel::fit(h, {1.0, 1.0, 1e-10});
    const auto [mean, var] = m.predict(vec({0.0}));
    CHECK(mean == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(var == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("gp reverts to the prior far from data") {
    const auto h = make_history({{0}, {1}}, {0.0, 1.0});
    const KernelParams kp{1.0, 1.0, 1e-6};
    const auto m = GpModel::fit(h, kp);
    const auto [mean, var] = m.predict(vec({200.0}));
    // de-standardized prior: mean 0.5, variance sigma_f^2 * scale^2 = 0.25
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(var == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("gp two-point posterior matches a hand-solved 2x2 system") {
    const auto h = make_history({{0}, {1}}, {0.0, 1.0});
    const KernelParams kp{1.0, 1.0, 1e-6};
    const auto m = GpModel::fit(h, kp);

    // oracle: standardized targets (-1, 1), explicit 2x2 inverse
    const double k01 = matern52(1.0, kp.lengthscale, kp.signal_var);
    const double diag = kp.signal_var + kp.noise_var;
    const double det = diag * diag - k01 * k01;
    const double a0 = (diag * -1.0 - k01 * 1.0) / det;
    const double a1 = (-k01 * -1.0 + diag * 1.0) / det;
    const double ks0 = matern52(0.5, kp.lengthscale, kp.signal_var);
    const double mean_std = ks0 * a0 + ks0 * a1;
    const double oracle_mean = 0.5 + 0.5 * mean_std;

    CHECK(m.predict(vec({0.5})).first == doctest::Approx(oracle_mean).epsilon(1e-8));
}

TEST_CASE("gp three-point prediction matches a dense solve without Cholesky") {
    const std::vector<IntegerPoint> xs{{0, 0}, {2, 1}, {-1, 3}};
    const std::vector<double> ys{1.5, -0.5, 4.0};
    const auto h = make_history(xs, ys);
    const KernelParams kp{1.7, 0.8, 1e-4};
    const auto m = GpModel::fit(h, kp);

    // replicate standardization, then invert the Gram matrix directly
    Eigen::Vector3d y(1.5, -0.5, 4.0);
    const double y_mean = y.mean();
    const double y_scale = std::sqrt((y.array() - y_mean).square().mean());
    Eigen::Vector3d y_std = (y.array() - y_mean) / y_scale;

    Eigen::MatrixXd X(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) X(i, j) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    Eigen::Matrix3d K;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            K(i, j) = matern52((X.row(i) - X.row(j)).norm(), kp.lengthscale, kp.signal_var);
    K.diagonal().array() += kp.noise_var;

    const Eigen::VectorXd q = vec({0.7, 0.9});
    Eigen::Vector3d ks;
    for (int i = 0; i < 3; ++i)
        ks(i) = matern52((X.row(i).transpose() - q).norm(), kp.lengthscale, kp.signal_var);
    const Eigen::Matrix3d Kinv = K.fullPivLu().inverse();
    const double oracle_mean = y_mean + y_scale * ks.dot(Kinv * y_std);
    const double oracle_var =
        y_scale * y_scale * (kp.signal_var - ks.dot(Kinv * ks));

    const auto [mean, var] = m.predict(q);
    CHECK(mean == doctest::Approx(oracle_mean).epsilon(1e-7));
    CHECK(var == doctest::Approx(oracle_var).epsilon(1e-5));
}

TEST_CASE("gp interpolation and variance ordering at training points") {
    const auto h = make_history({{-3}, {0}, {4}}, {2.0, -1.0, 5.0});
    const auto m = GpModel::fit(h, {1.5, 1.0, 1e-10});
    for (std::size_t i = 0; i < 3; ++i) {
        const double x = h.records[i].point[0];
        const auto [mean, var] = m.predict(vec({x}));
        CHECK(mean == doctest::Approx(h.records[i].observed).epsilon(1e-6));
        CHECK(var <= m.predict(vec({100.0})).second);
    }
    CHECK_THROWS_AS(m.predict(vec({0.0, 0.0})), ConfigError);
}

TEST_CASE("gram matrix stays positive definite with jitter") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> dims(1, 10), ns(2, 50), coords(-5, 5);
        const int d = dims(rng), n = ns(rng);
        std::vector<IntegerPoint> xs;
        std::vector<double> ys;
        std::normal_distribution<double> target(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            IntegerPoint x(static_cast<std::size_t>(d));
            for (auto& xi : x) xi = coords(rng);
            xs.push_back(x);
            ys.push_back(target(rng));
        }
        // duplicate points force the jitter path with tiny noise
        xs.push_back(xs.front());
        ys.push_back(ys.front());
        const auto h = make_history(xs, ys);
        CHECK_NOTHROW(GpModel::fit(h, {2.0, 1.0, 1e-10}));
    }
}

TEST_CASE("acquisition gradient matches central differences") {
    Rng rng(77);
    const auto h = make_history({{0, 0}, {3, 1}, {-2, 4}, {1, -3}}, {1.0, -2.0, 0.5, 3.0});
    const auto m = GpModel::fit(h, {2.0, 1.0, 1e-4});
    const double kappa = 2.576;
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::VectorXd x = vec({u(rng), u(rng)});
        const Eigen::VectorXd g = ucb_gradient(m, x, kappa);
        const double eps = 1e-5;
        for (Eigen::Index i = 0; i < 2; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += eps;
            xm(i) -= eps;
            const double fd =
                (ucb_acquisition(m, xp, kappa) - ucb_acquisition(m, xm, kappa)) / (2 * eps);
            CHECK(g(i) == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

namespace {

/// 1-d grid scan of the acquisition at 0.01 resolution.
double grid_argmax(const GpModel& m, const Bounds& b, double kappa) {
    double best_x = b.lower(0), best_f = -1e300;
    for (double x = b.lower(0); x <= b.upper(0) + 1e-12; x += 0.01) {
        const double f = ucb_acquisition(m, vec({x}), kappa);
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace

TEST_CASE("gp_suggest with large kappa explores away from data") {
    const auto h = make_history({{0}, {5}}, {5.0, 4.0});
    const Bounds b({0}, {5});
    const auto m = GpModel::fit(h, {1.0, 1.0, 1e-6});
    const double kappa = 10.0;
    Rng rng(5);
    const IntegerPoint suggestion = gp_suggest(m, b, kappa, {5}, rng);
    const double oracle = grid_argmax(m, b, kappa);
    CHECK(suggestion[0] == static_cast<int>(std::lround(oracle)));
    CHECK(suggestion[0] >= 2);  // away from both endpoints
    CHECK(suggestion[0] <= 3);
    CHECK(b.contains(suggestion));
}

TEST_CASE("gp_suggest with kappa zero exploits the posterior mean") {
    const auto h = make_history({{0}, {5}}, {5.0, 4.0});
    const Bounds b({0}, {5});
    const auto m = GpModel::fit(h, {1.0, 1.0, 1e-6});
    Rng rng(5);
    const IntegerPoint suggestion = gp_suggest(m, b, 0.0, {5}, rng);
    const double oracle = grid_argmax(m, b, 0.0);  // -mean, i.e. mean minimizer
    CHECK(suggestion[0] == static_cast<int>(std::lround(oracle)));
}

TEST_CASE("gp strategy falls back to uniform sampling before the initial design") {
    const Bounds b({0, 0}, {9, 9});
    GpStrategy s(b, 42);
    EvaluationHistory h;
    h.append({{1, 1}, 0.5, 0.0, 0.0});
    const auto x = s.suggest(h);
    CHECK(b.contains(x));
}

TEST_CASE("hyperparameter search improves the marginal likelihood") {
    Rng data_rng(9);
    std::vector<IntegerPoint> xs;
    std::vector<double> ys;
    for (int i = -5; i <= 5; ++i) {
        xs.push_back({i});
        ys.push_back(std::sin(0.8 * i));
    }
    const auto h = make_history(xs, ys);
    const KernelParams start{4.0, 1.0, 1e-2};
    Rng rng(17);
    const auto tuned = optimize_kernel_params(h, Bounds({-5}, {5}), start, rng);
    const double before = GpModel::fit(h, start).log_marginal_likelihood();
    const double after = GpModel::fit(h, tuned).log_marginal_likelihood();
    CHECK(after >= before - 1e-9);
}
