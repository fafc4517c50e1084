#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace deadreckon {

/// Seedable generator whose output is identical on every standard library:
/// the engine is std::mt19937_64 (fully specified by the standard) and the
/// uniform/normal transforms are implemented here instead of relying on the
/// implementation-defined std:: distributions.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal(double mean = 0.0, double sigma = 1.0);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace deadreckon
