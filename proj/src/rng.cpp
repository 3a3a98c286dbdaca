#include "slfv/rng.hpp"

namespace slfv {

namespace {

// splitmix64 finalizer
std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(splitmix(seed) ^ splitmix(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t command_seed(std::uint64_t master, std::string_view command) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : command) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(master, h);
}

}  // namespace slfv
