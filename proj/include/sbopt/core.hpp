#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

namespace sbopt {

using Rng = std::mt19937_64;
using BigInt = boost::multiprecision::cpp_int;

/// Raised for invalid user-facing configuration (bad bounds, bad flags).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a surrogate fit or solve breaks down numerically.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an external objective evaluation fails (bad exit, timeout).
struct EvaluationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using IntegerPoint = std::vector<int>;

/// Per-dimension integer box constraints.
class Bounds {
public:
    Bounds(std::vector<int> lower, std::vector<int> upper);

    std::size_t dim() const { return lower_.size(); }
    int lower(std::size_t i) const { return lower_[i]; }
    int upper(std::size_t i) const { return upper_[i]; }
    const std::vector<int>& lower() const { return lower_; }
    const std::vector<int>& upper() const { return upper_; }
    int width(std::size_t i) const { return upper_[i] - lower_[i]; }
    double mean_width() const;

    bool contains(const IntegerPoint& x) const;
    IntegerPoint clamp(const IntegerPoint& x) const;

private:
    std::vector<int> lower_;
    std::vector<int> upper_;
};

struct EvaluationRecord {
    IntegerPoint point;
    double observed = 0.0;
    double model_time = 0.0;  // seconds in fit + suggest for this iteration
    double eval_time = 0.0;   // seconds evaluating the objective
};

struct EvaluationHistory {
    std::vector<EvaluationRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    void append(EvaluationRecord r) { records.push_back(std::move(r)); }

    /// Index of the best (lowest) observation, earliest on ties.
    std::size_t best_index() const;
};

struct BudgetSpec {
    std::size_t max_evaluations = 500;
    double wall_clock_limit = 0.0;  // seconds; <= 0 disables the limit

    void validate() const;
};

enum class RunStatus { ok, numerical_failure, evaluation_failure };

struct RunLog {
    std::string config_id;
    std::uint64_t seed = 0;
    EvaluationHistory history;
    std::vector<double> best_so_far;
    RunStatus status = RunStatus::ok;
    std::string error;
};

/// Running minimum of the observed values; errors on empty history.
std::vector<double> best_so_far(const EvaluationHistory& history);

/// Exact number of lattice points in the box.
BigInt search_space_size(const Bounds& bounds);

/// One point drawn uniformly from the integer box.
IntegerPoint uniform_sample(const Bounds& bounds, Rng& rng);

/// Derives independent stream seeds from a master seed and a tag (FNV-1a).
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag, std::uint64_t index);

}  // namespace sbopt
