#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "sbopt/core.hpp"
#include "sbopt/strategy.hpp"

namespace sbopt {

/// Matern 5/2 covariance as a function of Euclidean distance r.
double matern52(double r, double lengthscale, double variance);

struct KernelParams {
    double lengthscale = 1.0;
    double signal_var = 1.0;
    double noise_var = 1e-4;
};

/// Exact GP regression with standardized targets and a Matern 5/2 kernel.
/// Predictions are reported on the raw target scale.
class GpModel {
public:
    static GpModel fit(const EvaluationHistory& history, const KernelParams& params);

    std::pair<double, double> predict(const Eigen::VectorXd& x) const;  // mean, variance
    void predict_with_gradient(const Eigen::VectorXd& x, double& mean, double& sd,
                               Eigen::VectorXd& dmean, Eigen::VectorXd& dsd) const;

    double log_marginal_likelihood() const;
    std::size_t train_size() const { return static_cast<std::size_t>(X_.rows()); }
    const KernelParams& params() const { return params_; }

private:
    Eigen::MatrixXd X_;       // n x d training inputs
    Eigen::VectorXd y_std_;   // standardized targets
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    KernelParams params_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;   // (K + sigma_n^2 I)^-1 y_std
    double lml_ = 0.0;

    Eigen::VectorXd cross_covariance(const Eigen::VectorXd& x) const;
};

/// Confidence-bound acquisition under minimization: A(x) = -mean + kappa * sd.
double ucb_acquisition(const GpModel& model, const Eigen::VectorXd& x, double kappa);
Eigen::VectorXd ucb_gradient(const GpModel& model, const Eigen::VectorXd& x, double kappa);

/// Maximizes the acquisition over the continuous box with multi-start
/// projected gradient ascent, then rounds to the nearest feasible integers.
IntegerPoint gp_suggest(const GpModel& model, const Bounds& bounds, double kappa,
                        const IntegerPoint& best_point, Rng& rng);

/// Maximizes the log marginal likelihood over (lengthscale, signal variance,
/// noise variance) with bounded multi-start Nelder-Mead in log space.
KernelParams optimize_kernel_params(const EvaluationHistory& history, const Bounds& bounds,
                                    const KernelParams& start, Rng& rng);

class GpStrategy final : public SurrogateStrategy {
public:
    GpStrategy(Bounds bounds, std::uint64_t seed, double kappa = 2.576);

    std::string name() const override { return "gp"; }
    std::size_t initial_design_size() const override { return 5; }
    void fit(const EvaluationHistory& history) override;
    IntegerPoint suggest(const EvaluationHistory& history) override;
    std::optional<double> model_value(const std::vector<double>& x) const override;

    const GpModel* model() const { return model_ ? &*model_ : nullptr; }

private:
    double kappa_;
    KernelParams params_;
    bool params_initialized_ = false;
    std::optional<GpModel> model_;
};

}  // namespace sbopt
