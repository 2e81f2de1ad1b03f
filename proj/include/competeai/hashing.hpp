#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace competeai {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// 64-bit FNV-1a; used only for seed derivation, never for integrity.
std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

} // namespace competeai
