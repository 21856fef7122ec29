#pragma once

#include <cstdint>
#include <string_view>

namespace smallscat {

/// 64-bit FNV-1a.
inline uint64_t fnv1a(std::string_view text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace smallscat
