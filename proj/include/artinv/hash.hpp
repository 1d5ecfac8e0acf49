#pragma once

#include <cstdint>
#include <string_view>

namespace artinv {

/* FNV-1a, 64 bit. Used for data-file checksums, config hashes and for
   deriving per-speaker/per-vowel random substreams from string ids. */

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace artinv
