#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "competeai/config.hpp"
#include "competeai/roster.hpp"
#include "competeai/run_log.hpp"
#include "competeai/world.hpp"

namespace competeai {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// State between two days: enough to continue a run exactly where it stopped.
struct Checkpoint {
    SimulationConfig config;
    Roster roster;
    World world;
    RunLog log;
    std::int64_t requests = 0; // gateway requests spent so far
    bool operator==(const Checkpoint&) const = default;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Magic "CAICKPT\0", u32 version, u64 payload length (little-endian), CBOR
/// payload, then the SHA-256 of everything before it.
std::string encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& file);

} // namespace competeai
