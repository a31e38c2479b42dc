#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace parity_qaoa {

/// Seeded generator with portable conversions. std::mt19937_64 and std::seed_seq are
/// fully specified by the standard; the distributions are not, so we convert ourselves.
class Rng {
   public:
    explicit Rng(uint64_t seed) : Rng({seed}) {
    }
    /// Independent stream keyed by (seed, stream ids...).
    Rng(std::initializer_list<uint64_t> key) {
        std::vector<uint32_t> words;
        for (uint64_t k : key) {
            words.push_back(static_cast<uint32_t>(k));
            words.push_back(static_cast<uint32_t>(k >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    uint64_t next() {
        return engine_();
    }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }
    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace parity_qaoa
