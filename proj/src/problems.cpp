#include "sbopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sbopt {

// ---------------------------------------------------------------------------
// Rosenbrock
// ---------------------------------------------------------------------------

RosenbrockProblem::RosenbrockProblem(std::size_t dim, int lower, int upper, double noise_sd)
    : bounds_(std::vector<int>(dim, lower), std::vector<int>(dim, upper)),
      noise_sd_(noise_sd) {
    if (dim < 2) throw ConfigError("rosenbrock: dimension must be >= 2");
}

double RosenbrockProblem::noiseless(const IntegerPoint& x) const {
    if (x.size() != bounds_.dim()) throw ConfigError("rosenbrock: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = static_cast<double>(x[i + 1]) - static_cast<double>(x[i]) * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

double RosenbrockProblem::evaluate(const IntegerPoint& x, Rng& noise_rng) {
    std::normal_distribution<double> noise(0.0, noise_sd_);
    return noiseless(x) + noise(noise_rng);
}

// ---------------------------------------------------------------------------
// Max-Cut
// ---------------------------------------------------------------------------

WeightedGraph maxcut_generate(std::size_t n, double edge_probability, double max_weight,
                              std::uint64_t seed) {
    if (n < 2) throw ConfigError("maxcut: need at least 2 nodes");
    if (edge_probability < 0.0 || edge_probability > 1.0)
        throw ConfigError("maxcut: edge probability must be in [0,1]");
    WeightedGraph g;
    g.node_count = n;
    Rng rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.0, max_weight);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (u01(rng) < edge_probability) g.edges.emplace_back(i, j, weight(rng));
    return g;
}

double maxcut_cut_weight(const WeightedGraph& graph, const IntegerPoint& x) {
    if (x.size() != graph.node_count) throw ConfigError("maxcut: assignment length mismatch");
    for (const int xi : x)
        if (xi != 0 && xi != 1) throw ConfigError("maxcut: assignment must be binary");
    double s = 0.0;
    for (const auto& [i, j, w] : graph.edges)
        if (x[i] != x[j]) s += w;
    return s;
}

std::pair<double, IntegerPoint> maxcut_bruteforce(const WeightedGraph& graph) {
    const std::size_t n = graph.node_count;
    if (n > 24) throw ConfigError("maxcut_bruteforce: limited to n <= 24");
    double best = -1.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double s = 0.0;
        for (const auto& [i, j, w] : graph.edges)
            if (((mask >> i) & 1u) != ((mask >> j) & 1u)) s += w;
        if (s > best) {
            best = s;
            best_mask = mask;
        }
    }
    IntegerPoint witness(n);
    for (std::size_t i = 0; i < n; ++i) witness[i] = (best_mask >> i) & 1u;
    return {best, witness};
}

MaxCutProblem::MaxCutProblem(WeightedGraph graph, double noise_sd)
    : graph_(std::move(graph)),
      bounds_(std::vector<int>(graph_.node_count, 0), std::vector<int>(graph_.node_count, 1)),
      noise_sd_(noise_sd) {}

double MaxCutProblem::noiseless(const IntegerPoint& x) const {
    return -maxcut_cut_weight(graph_, x);
}

double MaxCutProblem::evaluate(const IntegerPoint& x, Rng& noise_rng) {
    std::normal_distribution<double> noise(0.0, noise_sd_);
    return noiseless(x) + noise(noise_rng);
}

// ---------------------------------------------------------------------------
// TSP
// ---------------------------------------------------------------------------

std::vector<std::size_t> tsp_decode(const IntegerPoint& encoding, std::size_t city_count) {
    if (city_count < 3) throw ConfigError("tsp_decode: need at least 3 cities");
    if (encoding.size() != city_count - 2)
        throw ConfigError("tsp_decode: encoding length must be k - 2");
    std::vector<std::size_t> remaining(city_count - 1);
    std::iota(remaining.begin(), remaining.end(), 1);
    std::vector<std::size_t> tour{0};
    for (std::size_t i = 0; i < encoding.size(); ++i) {
        const int sel = encoding[i];
        if (sel < 1 || static_cast<std::size_t>(sel) > remaining.size())
            throw ConfigError("tsp_decode: selection index out of range at position " +
                              std::to_string(i));
        tour.push_back(remaining[static_cast<std::size_t>(sel - 1)]);
        remaining.erase(remaining.begin() + (sel - 1));
    }
    tour.push_back(remaining.front());  // one city left
    return tour;
}

TspProblem::TspProblem(ATSPInstance instance, bool noisy, int repetitions)
    : instance_(std::move(instance)),
      bounds_([&] {
          const std::size_t k = instance_.city_count;
          if (k < 3) throw ConfigError("tsp: need at least 3 cities");
          std::vector<int> lo(k - 2, 1), hi(k - 2);
          for (std::size_t i = 0; i < k - 2; ++i) hi[i] = static_cast<int>(k - 1 - i);
          return Bounds(std::move(lo), std::move(hi));
      }()),
      noisy_(noisy),
      repetitions_(repetitions) {}

double TspProblem::evaluate(const IntegerPoint& x, Rng& noise_rng) {
    const auto tour = tsp_decode(x, instance_.city_count);
    const std::size_t k = tour.size();
    auto arc = [&](std::size_t a) {
        const std::size_t from = tour[a];
        const std::size_t to = tour[(a + 1) % k];
        return instance_.distance[from][to];
    };
    if (!noisy_) {
        double len = 0.0;
        for (std::size_t a = 0; a < k; ++a) len += arc(a);
        return len;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < repetitions_; ++rep) {
        double len = 0.0;
        for (std::size_t a = 0; a < k; ++a) len += arc(a) + u(noise_rng);
        worst = std::max(worst, len);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Binarization wrapper
// ---------------------------------------------------------------------------

BinarizedProblem::BinarizedProblem(std::shared_ptr<Problem> inner)
    : inner_(std::move(inner)),
      bounds_({0}, {1})  // placeholder, rebuilt below
{
    const Bounds& ib = inner_->bounds();
    std::size_t total_bits = 0;
    for (std::size_t i = 0; i < ib.dim(); ++i) {
        const unsigned range = static_cast<unsigned>(ib.width(i)) + 1;
        if (range < 2 || (range & (range - 1)) != 0)
            throw ConfigError("binarize: range of dimension " + std::to_string(i) +
                              " is not a power of two");
        int bits = 0;
        for (unsigned r = range; r > 1; r >>= 1) ++bits;
        bit_widths_.push_back(bits);
        total_bits += static_cast<std::size_t>(bits);
    }
    bounds_ = Bounds(std::vector<int>(total_bits, 0), std::vector<int>(total_bits, 1));
}

IntegerPoint BinarizedProblem::decode(const IntegerPoint& bits) const {
    if (bits.size() != bounds_.dim()) throw ConfigError("binarize: bit vector length mismatch");
    const Bounds& ib = inner_->bounds();
    IntegerPoint x(ib.dim());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ib.dim(); ++i) {
        int v = 0;
        for (int b = 0; b < bit_widths_[i]; ++b) {
            const int bit = bits[pos++];
            if (bit != 0 && bit != 1) throw ConfigError("binarize: non-binary entry");
            v = (v << 1) | bit;  // MSB first
        }
        x[i] = ib.lower(i) + v;
    }
    return x;
}

IntegerPoint BinarizedProblem::encode(const IntegerPoint& inner_point) const {
    const Bounds& ib = inner_->bounds();
    if (inner_point.size() != ib.dim()) throw ConfigError("binarize: point length mismatch");
    IntegerPoint bits;
    bits.reserve(bounds_.dim());
    for (std::size_t i = 0; i < ib.dim(); ++i) {
        const int v = inner_point[i] - ib.lower(i);
        for (int b = bit_widths_[i] - 1; b >= 0; --b) bits.push_back((v >> b) & 1);
    }
    return bits;
}

double BinarizedProblem::evaluate(const IntegerPoint& x, Rng& noise_rng) {
    return inner_->evaluate(decode(x), noise_rng);
}

double BinarizedProblem::noiseless(const IntegerPoint& x) const {
    return inner_->noiseless(decode(x));
}

// ---------------------------------------------------------------------------
// Shuffle wrapper
// ---------------------------------------------------------------------------

namespace {
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    Rng rng(seed);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}
}  // namespace

ShuffledProblem::ShuffledProblem(std::shared_ptr<Problem> inner, std::uint64_t seed)
    : ShuffledProblem(inner, random_permutation(inner->bounds().dim(), seed)) {}

ShuffledProblem::ShuffledProblem(std::shared_ptr<Problem> inner,
                                 std::vector<std::size_t> permutation)
    : inner_(std::move(inner)),
      perm_(std::move(permutation)),
      bounds_([&] {
          const Bounds& ib = inner_->bounds();
          if (perm_.size() != ib.dim())
              throw ConfigError("shuffle: permutation length mismatch");
          std::vector<int> lo(ib.dim()), hi(ib.dim());
          for (std::size_t i = 0; i < ib.dim(); ++i) {
              lo[perm_[i]] = ib.lower(i);
              hi[perm_[i]] = ib.upper(i);
          }
          return Bounds(std::move(lo), std::move(hi));
      }()) {}

IntegerPoint ShuffledProblem::unshuffle(const IntegerPoint& x) const {
    if (x.size() != bounds_.dim()) throw ConfigError("shuffle: point length mismatch");
    IntegerPoint y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[perm_[i]];
    return y;
}

double ShuffledProblem::evaluate(const IntegerPoint& x, Rng& noise_rng) {
    return inner_->evaluate(unshuffle(x), noise_rng);
}

double ShuffledProblem::noiseless(const IntegerPoint& x) const {
    return inner_->noiseless(unshuffle(x));
}

// ---------------------------------------------------------------------------
// External adapter (process spawning lives in external.cpp)
// ---------------------------------------------------------------------------

ExternalProblem::ExternalProblem(std::string command_template, Bounds bounds,
                                 double timeout_seconds)
    : command_template_(std::move(command_template)),
      bounds_(std::move(bounds)),
      timeout_seconds_(timeout_seconds) {
    if (command_template_.find("{x}") == std::string::npos)
        throw ConfigError("external: command template must contain the {x} placeholder");
}

double ExternalProblem::evaluate(const IntegerPoint& x, Rng&) {
    return external_eval(command_template_, x, timeout_seconds_);
}

}  // namespace sbopt
