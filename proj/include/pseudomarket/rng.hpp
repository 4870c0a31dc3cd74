#pragma once

#include <cstdint>

namespace pseudomarket {

// Counter-based randomness. Every (seed, trial, agent, round) tuple owns an
// independent substream, so the order in which agents are evaluated within a
// round can never change what anyone samples, and trials can run on any
// number of threads with identical results.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t agent,
              std::uint64_t round) {
        std::uint64_t k = splitmix64(seed);
        k = splitmix64(k ^ trial);
        k = splitmix64(k ^ agent);
        k = splitmix64(k ^ round);
        state_ = k;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

private:
    std::uint64_t state_;
};

// Agent id reserved for mechanism-owned draws (random tie-breaking).
inline constexpr std::uint64_t kMechanismAgent = ~0ull;

// Binds (seed, trial); hands out per-(agent, round) streams.
struct TrialRng {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;

    RngStream stream(std::uint64_t agent, std::uint64_t round) const {
        return RngStream(seed, trial, agent, round);
    }
    RngStream mechanism_stream(std::uint64_t round) const {
        return RngStream(seed, trial, kMechanismAgent, round);
    }
};

}  // namespace pseudomarket
