#include "knapmix/instance.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "knapmix/error.hpp"

namespace knapmix {

namespace {

constexpr std::size_t kMaxKeyBits = 64;

void require_dimension(const KnapsackInstance& instance, const Solution& x) {
  if (x.size() != instance.size()) {
    throw InputError("solution has length " + std::to_string(x.size()) +
                     " but the instance has " + std::to_string(instance.size()) + " items");
  }
}

}  // namespace

KnapsackInstance::KnapsackInstance(std::vector<Weight> weights, Weight budget)
    : weights_(std::move(weights)), budget_(budget) {
  if (weights_.empty()) {
    throw InputError("instance needs at least one item (n >= 1)");
  }
  if (budget_ < 0) {
    throw InputError("budget must be non-negative, got " + std::to_string(budget_));
  }
  constexpr Weight kMax = std::numeric_limits<Weight>::max();
  Weight running = budget_;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const Weight a = weights_[i];
    if (a < 0) {
      throw InputError("weight " + std::to_string(i + 1) + " is negative (" +
                       std::to_string(a) + ")");
    }
    if (a > kMax - running) {
      throw InputError("sum of weights and budget overflows 63 bits at weight " +
                       std::to_string(i + 1));
    }
    running += a;
  }
  total_ = running - budget_;
}

KnapsackInstance::KnapsackInstance(Unchecked, std::vector<Weight> weights, Weight budget)
    : weights_(std::move(weights)), budget_(budget) {
  for (Weight a : weights_) total_ += a;
}

KnapsackInstance KnapsackInstance::prefix(std::size_t count) const {
  if (count > weights_.size()) {
    throw InputError("prefix length " + std::to_string(count) + " exceeds n = " +
                     std::to_string(weights_.size()));
  }
  return KnapsackInstance(Unchecked{},
                          std::vector<Weight>(weights_.begin(), weights_.begin() + count),
                          budget_);
}

Solution::Solution(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw InputError("solution entries must be 0 or 1");
  }
}

Solution Solution::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw InputError("bit string may contain only '0' and '1': \"" + std::string(text) + "\"");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Solution(std::move(bits));
}

Solution Solution::from_key(std::uint64_t key, std::size_t n) {
  if (n > kMaxKeyBits) throw InputError("keys address at most 64 positions");
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[i] = static_cast<std::uint8_t>((key >> (n - 1 - i)) & 1U);
  }
  return Solution(std::move(bits));
}

std::uint64_t Solution::key() const {
  if (bits_.size() > kMaxKeyBits) throw InputError("keys address at most 64 positions");
  std::uint64_t k = 0;
  for (auto b : bits_) k = (k << 1) | b;
  return k;
}

std::string Solution::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

SolutionSet::SolutionSet(std::size_t dimension, std::vector<std::uint64_t> sorted_keys)
    : dimension_(dimension), keys_(std::move(sorted_keys)) {
  if (!std::is_sorted(keys_.begin(), keys_.end()) ||
      std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end()) {
    throw InvariantError("solution keys must be strictly increasing");
  }
}

Solution SolutionSet::at(std::size_t index) const {
  return Solution::from_key(keys_.at(index), dimension_);
}

std::size_t SolutionSet::index_of(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return keys_.size();
  return static_cast<std::size_t>(it - keys_.begin());
}

std::vector<Solution> SolutionSet::solutions() const {
  std::vector<Solution> out;
  out.reserve(keys_.size());
  for (auto k : keys_) out.push_back(Solution::from_key(k, dimension_));
  return out;
}

Weight weight(const KnapsackInstance& instance, const Solution& x) {
  require_dimension(instance, x);
  Weight total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) total += instance.weight(i);
  }
  return total;
}

bool is_feasible(const KnapsackInstance& instance, const Solution& x) {
  return weight(instance, x) <= instance.budget();
}

SolutionSet enumerate(const KnapsackInstance& instance, std::size_t cap) {
  const std::size_t n = instance.size();
  if (n > cap || n >= kMaxKeyBits) {
    throw CapacityError("enumeration cap is n <= " + std::to_string(std::min(cap, kMaxKeyBits - 1)) +
                        " but the instance has n = " + std::to_string(n));
  }
  // Depth-first over positions 0..n-1 trying 0 before 1 visits keys in
  // ascending order; branches that exceed the budget are pruned.
  std::vector<std::uint64_t> keys;
  struct Frame {
    std::size_t depth;
    std::uint64_t key;
    Weight load;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  const auto weights = instance.weights();
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == n) {
      keys.push_back(f.key);
      continue;
    }
    const Weight with = f.load + weights[f.depth];
    if (with <= instance.budget()) stack.push_back({f.depth + 1, (f.key << 1) | 1U, with});
    stack.push_back({f.depth + 1, f.key << 1, f.load});
  }
  return SolutionSet(n, std::move(keys));
}

std::uint64_t exact_count_suffix(const KnapsackInstance& instance, std::size_t first,
                                 Weight budget) {
  const std::size_t n = instance.size();
  if (first > n) throw InputError("suffix start beyond n");
  if (budget < 0) return 0;

  std::vector<Weight> suffix_total(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix_total[i] = suffix_total[i + 1] + instance.weight(i);

  std::vector<std::unordered_map<Weight, std::uint64_t>> memo(n + 1);

  auto count = [&](auto&& self, std::size_t i, Weight residual) -> std::uint64_t {
    if (residual < 0) return 0;
    if (i == n) return 1;
    if (residual >= suffix_total[i]) {
      // Every completion fits: 2^(n-i).
      if (n - i >= 64) throw CapacityError("solution count exceeds 64 bits");
      return std::uint64_t{1} << (n - i);
    }
    auto& table = memo[i];
    if (auto it = table.find(residual); it != table.end()) return it->second;
    const std::uint64_t skip = self(self, i + 1, residual);
    const std::uint64_t take = self(self, i + 1, residual - instance.weight(i));
    if (skip > std::numeric_limits<std::uint64_t>::max() - take) {
      throw CapacityError("solution count exceeds 64 bits");
    }
    table.emplace(residual, skip + take);
    return skip + take;
  };
  return count(count, first, budget);
}

std::uint64_t exact_count(const KnapsackInstance& instance) {
  return exact_count_suffix(instance, 0, instance.budget());
}

}  // namespace knapmix
