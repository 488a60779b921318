#pragma once

#include <cstdint>
#include <initializer_list>

namespace cnotasym {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable seed for one experiment cell. Depends only on the values passed,
/// never on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Spelled
/// out so sampled counts are identical across standard library vendors.
template <class Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace cnotasym
