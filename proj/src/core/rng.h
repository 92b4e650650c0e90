#pragma once

#include <cmath>
#include <cstdint>

namespace dualray {

// splitmix64. Deterministic across platforms and compilers, which std::mt19937
// plus std::normal_distribution is not; every stochastic draw in the project
// goes through this.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream derivation: hash a seed with a stream tag so independent consumers
// (per step, per sample, per purpose) get decorrelated sequences.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
    uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (tag << 6) + (tag >> 2));
    splitmix64(s);
    return splitmix64(s);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t tag_a, uint64_t tag_b) {
    return mix_seed(mix_seed(seed, tag_a), tag_b);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // Warm up so nearby seeds diverge immediately.
        splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dualray
