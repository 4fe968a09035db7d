#pragma once

// Seeded random model generation, shared by the property-check suites and
// the tests. Hand-rolled generator so sequences are identical across
// standard library implementations.

#include <cstdint>
#include <string>
#include <vector>

#include "pbn/space.hpp"

namespace pbn::corpus {

// xorshift64* PRNG. Seed must be nonzero.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    // Uniform in [0,1) from the top 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

// Random space with `n` outcomes and strictly positive normalized weights.
inline SampleSpace random_space(Rng& rng, std::size_t n) {
    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(n);
    weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("w" + std::to_string(i));
        weights.push_back(0.05 + rng.next_double());
    }
    return build_space(std::move(labels), std::move(weights), std::nullopt, /*normalize=*/true);
}

inline RandomVariable random_rv(Rng& rng, std::size_t n, const std::string& name) {
    RandomVariable rv;
    rv.name = name;
    rv.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        rv.values.push_back(-3.0 + 6.0 * rng.next_double());
    }
    return rv;
}

// Random variable taking at most `k` distinct values, so its level sets form
// a coarse partition.
inline RandomVariable random_coarse_rv(Rng& rng, std::size_t n, std::size_t k,
                                       const std::string& name) {
    std::vector<double> levels;
    levels.reserve(k);
    for (std::size_t j = 0; j < k; ++j) levels.push_back(-2.0 + 4.0 * rng.next_double());
    RandomVariable rv;
    rv.name = name;
    rv.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        rv.values.push_back(levels[rng.next_below(k)]);
    }
    return rv;
}

inline Event random_event(Rng& rng, std::size_t n) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.next_u64() & 1) members.push_back(i);
    }
    if (members.empty()) members.push_back(rng.next_below(n));
    return Event(std::move(members));
}

// Random partition into at most `k` nonempty atoms.
inline Partition random_partition(Rng& rng, const SampleSpace& space, std::size_t k) {
    const std::size_t n = space.size();
    std::vector<std::vector<std::size_t>> buckets(k);
    for (std::size_t i = 0; i < n; ++i) {
        buckets[rng.next_below(k)].push_back(i);
    }
    std::vector<Event> atoms;
    for (auto& b : buckets) {
        if (!b.empty()) atoms.emplace_back(std::move(b));
    }
    return Partition(space, std::move(atoms));
}

}  // namespace pbn::corpus
