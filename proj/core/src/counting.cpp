#include "knapmix/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "knapmix/analysis.hpp"
#include "knapmix/chain.hpp"
#include "knapmix/error.hpp"
#include "knapmix/rng.hpp"

namespace knapmix {

Ratio ratio_truth(const KnapsackInstance& instance, std::size_t i, std::size_t enumeration_cap) {
  if (i == 0 || i > instance.size()) throw InputError("level must lie in [1, n]");
  if (i > enumeration_cap) {
    throw CapacityError("prefix instance exceeds the enumeration cap of " +
                        std::to_string(enumeration_cap));
  }
  const std::uint64_t smaller = exact_count(instance.prefix(i - 1));
  const std::uint64_t larger = exact_count(instance.prefix(i));
  const std::uint64_t g = std::gcd(smaller, larger);
  return Ratio{smaller / g, larger / g};
}

LevelSampler chain_sampler(unsigned threads) {
  return [threads](const KnapsackInstance& instance, std::uint64_t steps, std::size_t count,
                   std::uint64_t seed) {
    return sample(ChainConfig(instance, seed), steps, count, threads);
  };
}

LevelSampler exact_sampler(std::size_t enumeration_cap) {
  return [enumeration_cap](const KnapsackInstance& instance, std::uint64_t, std::size_t count,
                           std::uint64_t seed) {
    const SolutionSet set = enumerate(instance, enumeration_cap);
    Stream stream(seed);
    std::vector<Solution> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back(set.at(static_cast<std::size_t>(stream.below(set.count()))));
    }
    return out;
  };
}

std::uint64_t samples_per_level(std::size_t n, double epsilon) {
  return static_cast<std::uint64_t>(std::ceil(74.0 * static_cast<double>(n) / (epsilon * epsilon)));
}

std::uint64_t median_replicates(double delta) {
  return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(2.0 / delta)));
}

CountEstimate approx_count(const KnapsackInstance& instance, const CountOptions& options) {
  const double epsilon = options.epsilon;
  const double delta = options.delta;
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const LevelSampler sampler = options.sampler ? options.sampler : chain_sampler();
  const std::size_t n = instance.size();

  CountEstimate result;
  result.epsilon = epsilon;
  result.delta = delta;
  result.samples_per_level = samples_per_level(n, epsilon);
  result.replicates = median_replicates(delta);
  result.steps_per_sample.resize(n);
  for (std::size_t i = 1; i <= n; ++i) {
    result.steps_per_sample[i - 1] = theorem_bound(i, epsilon / (8.0 * static_cast<double>(n)));
  }

  const auto m = static_cast<std::size_t>(result.samples_per_level);
  const double floor_ratio = 1.0 / (2.0 * static_cast<double>(m));
  std::vector<std::vector<double>> ratios(result.replicates, std::vector<double>(n));
  for (std::uint64_t r = 0; r < result.replicates; ++r) {
    const std::uint64_t replicate_seed = derive_seed(options.seed, r);
    double estimate = 1.0;
    for (std::size_t i = n; i >= 1; --i) {
      const KnapsackInstance level = instance.prefix(i);
      const auto draws =
          sampler(level, result.steps_per_sample[i - 1], m, derive_seed(replicate_seed, i));
      const auto zeros = static_cast<std::size_t>(
          std::count_if(draws.begin(), draws.end(), [i](const Solution& x) { return !x[i - 1]; }));
      if (zeros == 0) {
        throw EstimatorError("level " + std::to_string(i) + " drew no solution with x_" +
                             std::to_string(i) + " = 0 in " + std::to_string(m) +
                             " samples; the true ratio is at least 1/2, so the sampler has "
                             "failed (increase samples or steps)");
      }
      const double ratio = std::max(static_cast<double>(zeros) / static_cast<double>(m), floor_ratio);
      ratios[r][i - 1] = ratio;
      estimate /= ratio;
    }
    result.replicate_estimates.push_back(estimate);
  }

  std::vector<std::size_t> order(result.replicates);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.replicate_estimates[a] < result.replicate_estimates[b];
  });
  const std::size_t median = order[(order.size() - 1) / 2];
  result.estimate = result.replicate_estimates[median];
  result.per_level_ratios = ratios[median];
  return result;
}

}  // namespace knapmix
