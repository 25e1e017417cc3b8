#pragma once

// Counter-based keyed generator. Each labeled domain is its own stream:
// draw i of domain D under seed s is mix(s, D, i) and nothing else, so
// adding draws to one domain never perturbs another.

#include <cstdint>
#include <string_view>

namespace ksfft {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class KeyedStream {
 public:
  KeyedStream(std::uint64_t seed, std::string_view domain)
      : key_(splitmix64(splitmix64(seed) ^ fnv1a(domain))) {}

  std::uint64_t next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform on [0, n), n >= 1, by rejection.
  std::uint64_t uniform(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ksfft
