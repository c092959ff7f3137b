#include "sbopt/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sbopt {

Bounds::Bounds(std::vector<int> lower, std::vector<int> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
        throw ConfigError("Bounds: lower/upper must be non-empty and equal length");
    for (std::size_t i = 0; i < lower_.size(); ++i)
        if (lower_[i] > upper_[i])
            throw ConfigError("Bounds: lower > upper at dimension " + std::to_string(i));
}

double Bounds::mean_width() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += width(i);
    return s / static_cast<double>(dim());
}

bool Bounds::contains(const IntegerPoint& x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
    return true;
}

IntegerPoint Bounds::clamp(const IntegerPoint& x) const {
    IntegerPoint out(x);
    for (std::size_t i = 0; i < dim() && i < out.size(); ++i)
        out[i] = std::clamp(out[i], lower_[i], upper_[i]);
    return out;
}

std::size_t EvaluationHistory::best_index() const {
    if (records.empty()) throw ConfigError("best_index on empty history");
    std::size_t best = 0;
    for (std::size_t m = 1; m < records.size(); ++m)
        if (records[m].observed < records[best].observed) best = m;
    return best;
}

void BudgetSpec::validate() const {
    if (max_evaluations < 1) throw ConfigError("budget must be >= 1");
    if (wall_clock_limit < 0.0) throw ConfigError("wall clock limit must be positive");
}

std::vector<double> best_so_far(const EvaluationHistory& history) {
    if (history.empty()) throw ConfigError("best_so_far on empty history");
    std::vector<double> out;
    out.reserve(history.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : history.records) {
        best = std::min(best, r.observed);
        out.push_back(best);
    }
    return out;
}

BigInt search_space_size(const Bounds& bounds) {
    BigInt total = 1;
    for (std::size_t i = 0; i < bounds.dim(); ++i)
        total *= BigInt(bounds.width(i) + 1);
    return total;
}

IntegerPoint uniform_sample(const Bounds& bounds, Rng& rng) {
    IntegerPoint x(bounds.dim());
    for (std::size_t i = 0; i < bounds.dim(); ++i) {
        std::uniform_int_distribution<int> dist(bounds.lower(i), bounds.upper(i));
        x[i] = dist(rng);
    }
    return x;
}

namespace {
std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, &master, sizeof(master));
    h = fnv1a(h, tag.data(), tag.size());
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag, std::uint64_t index) {
    std::uint64_t h = derive_seed(master, tag);
    return fnv1a(h, &index, sizeof(index));
}

}  // namespace sbopt
