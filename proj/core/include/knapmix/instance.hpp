#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace knapmix {

using Weight = std::int64_t;

// A 0-1 knapsack constraint  a_1 x_1 + ... + a_n x_n <= b  with
// non-negative integer weights and budget.
//
// Construction validates: n >= 1, every weight >= 0, budget >= 0, and
// sum(weights) + budget < 2^63, so no weight sum computed later can overflow.
class KnapsackInstance {
 public:
  KnapsackInstance(std::vector<Weight> weights, Weight budget);

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const Weight> weights() const noexcept { return weights_; }
  Weight weight(std::size_t i) const { return weights_.at(i); }
  Weight budget() const noexcept { return budget_; }
  Weight total_weight() const noexcept { return total_; }

  // The instance restricted to the first `count` items, same budget.
  // count == 0 is allowed here and yields the empty constraint "0 <= b";
  // it is used only as the base of prefix recursions.
  KnapsackInstance prefix(std::size_t count) const;

  friend bool operator==(const KnapsackInstance&, const KnapsackInstance&) = default;

 private:
  struct Unchecked {};
  KnapsackInstance(Unchecked, std::vector<Weight> weights, Weight budget);

  std::vector<Weight> weights_;
  Weight budget_ = 0;
  Weight total_ = 0;
};

// A binary vector x of fixed length. Index 0 is the first (most significant)
// position; text form is "x_1 x_2 ... x_n" without separators, e.g. "1101".
class Solution {
 public:
  Solution() = default;
  explicit Solution(std::size_t n) : bits_(n, 0) {}
  explicit Solution(std::vector<std::uint8_t> bits);

  static Solution zeros(std::size_t n) { return Solution(n); }
  // Parses a string of '0'/'1'. Throws InputError on any other character.
  static Solution from_string(std::string_view text);
  // Inverse of key(): the n-bit big-endian value `key`.
  static Solution from_key(std::uint64_t key, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  void flip(std::size_t i) { bits_.at(i) ^= 1U; }
  Solution flipped(std::size_t i) const {
    Solution copy = *this;
    copy.flip(i);
    return copy;
  }

  // Big-endian integer value of the bits (position 0 is the highest bit).
  // Requires size() <= 64.
  std::uint64_t key() const;
  std::string to_string() const;

  // Lexicographic order on equal-length vectors coincides with key() order.
  friend auto operator<=>(const Solution&, const Solution&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// All feasible solutions in canonical (key-ascending) order.
class SolutionSet {
 public:
  SolutionSet() = default;
  SolutionSet(std::size_t dimension, std::vector<std::uint64_t> sorted_keys);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t count() const noexcept { return keys_.size(); }
  std::span<const std::uint64_t> keys() const noexcept { return keys_; }
  Solution at(std::size_t index) const;

  // Index of `key` in canonical order, or count() if absent.
  std::size_t index_of(std::uint64_t key) const;
  std::size_t index_of(const Solution& x) const { return index_of(x.key()); }
  bool contains(const Solution& x) const { return index_of(x) != count(); }

  std::vector<Solution> solutions() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::uint64_t> keys_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 20;

Weight weight(const KnapsackInstance& instance, const Solution& x);
bool is_feasible(const KnapsackInstance& instance, const Solution& x);

// Exhaustive scan of all 2^n vectors. Throws CapacityError if n > cap.
SolutionSet enumerate(const KnapsackInstance& instance,
                      std::size_t cap = kDefaultEnumerationCap);

// Number of feasible solutions via N(i, b) = N(i+1, b) + N(i+1, b - a_i),
// memoized on (item, residual budget). Throws CapacityError if the count
// does not fit in 64 bits.
std::uint64_t exact_count(const KnapsackInstance& instance);

// Same recursion over items [first, n) with an arbitrary residual budget;
// returns 0 when budget < 0.
std::uint64_t exact_count_suffix(const KnapsackInstance& instance, std::size_t first,
                                 Weight budget);

}  // namespace knapmix
