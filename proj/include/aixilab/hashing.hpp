#pragma once

#include <cstdint>
#include <string_view>

namespace aixilab {

// FNV-1a 64-bit: stable across platforms, used to stamp manifests so outputs
// can name the exact configuration that produced them.
inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace aixilab
