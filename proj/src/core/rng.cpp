#include "competeai/rng.hpp"

#include <string>

#include "competeai/hashing.hpp"

namespace competeai {

std::uint64_t UnitRng::next()
{
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double UnitRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view unit, int day, std::string_view purpose)
{
    std::string key;
    key.reserve(unit.size() + purpose.size() + 16);
    key.append(unit).push_back('\x1f');
    key.append(std::to_string(day)).push_back('\x1f');
    key.append(purpose);
    UnitRng mix(seed ^ fnv1a64(key));
    return mix.next();
}

} // namespace competeai
