#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace textaug {

/// Seeded generator whose derived draws are identical on every platform.
///
/// std::mt19937_64's raw output is fully specified by the standard, while the
/// standard distributions are not, so bounded integers and unit reals are
/// derived here from raw engine words.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 bits of precision.
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

/// Combines a running hash with another value (splitmix64 finalizer).
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

inline std::uint64_t hash_combine(std::uint64_t seed, std::string_view value) {
  return hash_combine(seed, fnv1a64(value));
}

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace textaug
