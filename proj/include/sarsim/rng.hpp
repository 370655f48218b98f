#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sarsim {

// Deterministic random stream. Every consumer derives its own stream from the
// run seed plus a label (and optionally an index), so adding a draw in one
// subsystem never shifts the sequence another subsystem sees.
//
// Distribution code is implemented here instead of using <random>'s
// distribution templates because those are allowed to differ between standard
// library implementations; the raw mt19937_64 sequence is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);

    // Box-Muller; caches the spare deviate.
    double normal(double mean = 0.0, double stddev = 1.0);

    bool bernoulli(double p);

    // Uniform integer on [lo, hi], inclusive. Rejection sampling, no bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 step, used for seed derivation and usable as a cheap hash.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sarsim
