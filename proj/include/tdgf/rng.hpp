#pragma once

#include <cmath>
#include <cstdint>

namespace tdgf {

// Splittable counter-style generator built on splitmix64. Streams are derived by
// mixing a run seed with stream tags, so every sampler/worker gets an independent,
// reproducible sequence from a single recorded seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static uint64_t mix(uint64_t a, uint64_t b) {
        // boost-style hash combine on top of splitmix64 finalizers
        a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
        return finalize(a);
    }

    static Rng derive(uint64_t seed, uint64_t tag0, uint64_t tag1 = 0, uint64_t tag2 = 0) {
        return Rng(mix(mix(mix(seed, tag0), tag1), tag2));
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return finalize(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; the spare value is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static uint64_t finalize(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace tdgf
