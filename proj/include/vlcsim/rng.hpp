#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is drawn from a stream derived from
// a master seed plus a list of integer labels (experiment point, policy,
// trial, episode, step, ...).  Streams are independent of call order and of
// how work is split across threads, which is what makes the CSV outputs
// byte-identical under any worker count.  The core generator is SplitMix64;
// distributions are hand-rolled so results do not depend on the standard
// library implementation.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace vlcsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    // Derive an independent substream from a seed and a label path.
    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix64(s);
        for (std::uint64_t l : labels) {
            s = h ^ (l + 0x9E3779B97F4A7C15ULL);
            h = splitmix64(s);
        }
        return Rng(h);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // index in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller (single-value form, no cached spare).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
};

} // namespace vlcsim
