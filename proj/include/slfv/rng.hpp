#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace slfv {

// Counter-based seed derivation: master -> command -> replicate.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t command_seed(std::uint64_t master, std::string_view command);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  // Open interval (0,1], safe for log and negative powers.
  double uniform_pos() { return 1.0 - unit_(engine_); }
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }
  double normal() { return normal_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::uint64_t poisson(double mean) {
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace slfv
