#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tda {

using Rng = std::mt19937_64;

// Seed derivation: every random stream is keyed by (root seed, component name, indices).
// h0 = mix(root); h1 = mix(h0 ^ fnv1a(component)); h_{k+1} = mix(h_k ^ index_k),
// where mix is the splitmix64 finalizer. Streams are independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                          std::initializer_list<std::uint64_t> indices = {});

inline Rng make_rng(std::uint64_t root, std::string_view component,
                    std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(root, component, indices));
}

}  // namespace tda
