#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pbn {

// Counter-mode block generator (Philox 4x32, 10 rounds). Every 128-bit block
// is a pure function of (key, counter), so the draw at coordinate
// (path, interval, draw) never depends on evaluation order — serial and
// parallel runs produce bit-identical samples.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    // All draws belonging to one (path, interval) cell, in a fixed order.
    class Stream {
      public:
        // Uniform on [0, 1), 53 random bits.
        double next_uniform() {
            return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
        }

        // Uniform on (0, 1]; safe under log.
        double next_open() {
            return static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53;
        }

        double next_gaussian() {
            if (have_cached_) {
                have_cached_ = false;
                return cached_;
            }
            const double r = std::sqrt(-2.0 * std::log(next_open()));
            const double theta = 6.283185307179586476925287 * next_uniform();
            cached_ = r * std::sin(theta);
            have_cached_ = true;
            return r * std::cos(theta);
        }

        // Product-of-uniforms counting; means above 30 are split off in
        // chunks (a Poisson sum) to avoid underflow of exp(-mean).
        std::uint64_t next_poisson(double mean) {
            std::uint64_t total = 0;
            while (mean > 30.0) {
                total += poisson_small(30.0);
                mean -= 30.0;
            }
            return total + poisson_small(mean);
        }

      private:
        friend class CounterRng;
        Stream(const CounterRng* owner, std::uint64_t path, std::uint32_t interval)
            : owner_(owner), path_(path), interval_(interval) {}

        std::uint64_t next_bits() {
            if (half_ == 0) {
                buffer_ = owner_->block({block_++, static_cast<std::uint32_t>(path_),
                                         static_cast<std::uint32_t>(path_ >> 32), interval_});
                half_ = 1;
                return (static_cast<std::uint64_t>(buffer_[0]) << 32) | buffer_[1];
            }
            half_ = 0;
            return (static_cast<std::uint64_t>(buffer_[2]) << 32) | buffer_[3];
        }

        std::uint64_t poisson_small(double mean) {
            const double threshold = std::exp(-mean);
            std::uint64_t k = 0;
            double product = next_uniform();
            while (product > threshold) {
                ++k;
                product *= next_uniform();
            }
            return k;
        }

        const CounterRng* owner_;
        std::uint64_t path_;
        std::uint32_t interval_;
        std::uint32_t block_ = 0;
        int half_ = 0;
        std::array<std::uint32_t, 4> buffer_{};
        bool have_cached_ = false;
        double cached_ = 0.0;
    };

    Stream stream(std::uint64_t path, std::uint32_t interval) const {
        return Stream(this, path, interval);
    }

    std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter) const {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t m0 = 0xD2511F53ULL * counter[0];
            const std::uint64_t m2 = 0xCD9E8D57ULL * counter[2];
            counter = {static_cast<std::uint32_t>(m2 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(m2),
                       static_cast<std::uint32_t>(m0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(m0)};
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return counter;
    }

  private:
    std::array<std::uint32_t, 2> key_;
};

}  // namespace pbn
