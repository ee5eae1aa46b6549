#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace codemix {

// 64-bit FNV-1a. Stable across platforms; used for feature hashing, cache
// keys and config fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace codemix
