#pragma once

#include <cstdint>
#include <string_view>

namespace competeai {

/// Small deterministic generator (splitmix64). Output is identical on every
/// platform, unlike the distributions in <random>.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

/// Stream keyed by (seed, unit, day, purpose), so scheduling order never changes draws.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view unit, int day, std::string_view purpose);

} // namespace competeai
