#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sbopt/core.hpp"

namespace sbopt {

/// Black-box objective contract: box bounds plus noisy evaluation.
/// noiseless() is available only where the noise model makes it meaningful.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string name() const = 0;
    virtual const Bounds& bounds() const = 0;
    virtual double evaluate(const IntegerPoint& x, Rng& noise_rng) = 0;

    virtual bool has_noiseless() const { return false; }
    virtual double noiseless(const IntegerPoint& x) const {
        (void)x;
        throw ConfigError("problem has no noiseless evaluation");
    }
};

// ---------------------------------------------------------------------------
// Discrete Rosenbrock
// ---------------------------------------------------------------------------

class RosenbrockProblem final : public Problem {
public:
    explicit RosenbrockProblem(std::size_t dim, int lower = -5, int upper = 10,
                               double noise_sd = 1e-6);

    std::string name() const override { return "rosenbrock"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;
    bool has_noiseless() const override { return true; }
    double noiseless(const IntegerPoint& x) const override;

private:
    Bounds bounds_;
    double noise_sd_;
};

// ---------------------------------------------------------------------------
// Weighted Max-Cut
// ---------------------------------------------------------------------------

struct WeightedGraph {
    std::size_t node_count = 0;
    // i < j, weight in [0, max_weight]
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
};

WeightedGraph maxcut_generate(std::size_t n, double edge_probability, double max_weight,
                              std::uint64_t seed);

/// Cut weight of a binary assignment (no noise, no negation).
double maxcut_cut_weight(const WeightedGraph& graph, const IntegerPoint& x);

/// Exhaustive maximum cut; guarded to n <= 24.
std::pair<double, IntegerPoint> maxcut_bruteforce(const WeightedGraph& graph);

/// Minimization view: evaluate returns -(cut weight) + N(0,1) noise.
class MaxCutProblem final : public Problem {
public:
    explicit MaxCutProblem(WeightedGraph graph, double noise_sd = 1.0);

    std::string name() const override { return "maxcut"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;
    bool has_noiseless() const override { return true; }
    double noiseless(const IntegerPoint& x) const override;

    const WeightedGraph& graph() const { return graph_; }

private:
    WeightedGraph graph_;
    Bounds bounds_;
    double noise_sd_;
};

// ---------------------------------------------------------------------------
// Perturbed asymmetric TSP with sequential encoding
// ---------------------------------------------------------------------------

struct ATSPInstance {
    std::string name;
    std::size_t city_count = 0;
    std::vector<std::vector<double>> distance;  // k x k, diagonal unused
};

/// Decodes a sequential encoding (d = k-2 selection indices over the
/// shrinking list of unvisited cities) into a full cyclic tour starting at
/// city 0. Encoding entries are 1-based.
std::vector<std::size_t> tsp_decode(const IntegerPoint& encoding, std::size_t city_count);

class TspProblem final : public Problem {
public:
    explicit TspProblem(ATSPInstance instance, bool noisy = true, int repetitions = 100);

    std::string name() const override { return "tsp"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;

    const ATSPInstance& instance() const { return instance_; }

private:
    ATSPInstance instance_;
    Bounds bounds_;
    bool noisy_;
    int repetitions_;
};

// ---------------------------------------------------------------------------
// Wrappers
// ---------------------------------------------------------------------------

/// Re-encodes each integer variable as a fixed-width bit group, MSB first.
/// Every inner range size must be a power of two.
class BinarizedProblem final : public Problem {
public:
    explicit BinarizedProblem(std::shared_ptr<Problem> inner);

    std::string name() const override { return inner_->name() + "+binarized"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;
    bool has_noiseless() const override { return inner_->has_noiseless(); }
    double noiseless(const IntegerPoint& x) const override;

    IntegerPoint decode(const IntegerPoint& bits) const;
    IntegerPoint encode(const IntegerPoint& inner_point) const;

private:
    std::shared_ptr<Problem> inner_;
    Bounds bounds_;
    std::vector<int> bit_widths_;
};

/// Applies a fixed seed-derived permutation to the input vector before
/// delegating to the inner problem.
class ShuffledProblem final : public Problem {
public:
    ShuffledProblem(std::shared_ptr<Problem> inner, std::uint64_t seed);
    ShuffledProblem(std::shared_ptr<Problem> inner, std::vector<std::size_t> permutation);

    std::string name() const override { return inner_->name() + "+shuffled"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;
    bool has_noiseless() const override { return inner_->has_noiseless(); }
    double noiseless(const IntegerPoint& x) const override;

    const std::vector<std::size_t>& permutation() const { return perm_; }

private:
    IntegerPoint unshuffle(const IntegerPoint& x) const;

    std::shared_ptr<Problem> inner_;
    std::vector<std::size_t> perm_;  // inner coordinate i reads wrapper slot perm_[i]
    Bounds bounds_;
};

// ---------------------------------------------------------------------------
// External command adapter
// ---------------------------------------------------------------------------

/// Runs a shell command with "{x}" replaced by the space-separated point and
/// parses one real from the last line of its stdout.
double external_eval(const std::string& command_template, const IntegerPoint& point,
                     double timeout_seconds);

class ExternalProblem final : public Problem {
public:
    ExternalProblem(std::string command_template, Bounds bounds,
                    double timeout_seconds = 600.0);

    std::string name() const override { return "external"; }
    const Bounds& bounds() const override { return bounds_; }
    double evaluate(const IntegerPoint& x, Rng& noise_rng) override;

private:
    std::string command_template_;
    Bounds bounds_;
    double timeout_seconds_;
};

}  // namespace sbopt
