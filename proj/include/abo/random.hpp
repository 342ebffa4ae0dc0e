#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "abo/types.hpp"

namespace abo {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed for a named substream, optionally indexed (e.g. by iteration).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0) {
  return mix_seed(mix_seed(parent ^ hash_tag(tag)) + index);
}

inline Point sample_uniform(const BoxDomain& domain, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point x(domain.dim());
  for (int i = 0; i < domain.dim(); ++i) {
    x[i] = domain.lower()[i] + unit(rng) * (domain.upper()[i] - domain.lower()[i]);
  }
  return x;
}

}  // namespace abo
