#include "tda/random.hpp"

namespace tda {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = mix(root);
  h = mix(h ^ fnv1a(component));
  for (auto i : indices) h = mix(h ^ i);
  return h;
}

}  // namespace tda
