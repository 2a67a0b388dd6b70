#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dbfuzz {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

/// Lower-case, zero-padded 16-digit hex.
std::string to_hex(std::uint64_t value);

/// fnv1a64 rendered as hex; the stable content hash used for mock matchers and
/// dedup keys.
inline std::string content_hash(std::string_view data) { return to_hex(fnv1a64(data)); }

/// A UUID-shaped identifier derived deterministically from `data`.
std::string stable_uuid(std::string_view data);

}  // namespace dbfuzz
