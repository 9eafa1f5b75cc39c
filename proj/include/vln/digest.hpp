#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vln {

// FNV-1a 64-bit hash, used for seed mixing and trace digests.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : data) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

// Lowercase hex rendering of fnv1a64, for request/response digests.
[[nodiscard]] std::string hex_digest(std::string_view data);

}  // namespace vln
