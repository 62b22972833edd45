#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "knapmix/instance.hpp"

namespace knapmix {

// Exact ratio num/den in lowest terms.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// |Omega_{i-1}| / |Omega_i| for the prefix instances (a_1..a_i, b), i in [1, n].
// Equals Pr[x_i = 0] under the uniform distribution on Omega_i.
Ratio ratio_truth(const KnapsackInstance& instance, std::size_t i,
                  std::size_t enumeration_cap = kDefaultEnumerationCap);

// Draws `count` solutions of `instance` (approximately) uniformly, using
// `steps` chain steps per draw where applicable and substreams of `seed`.
using LevelSampler = std::function<std::vector<Solution>(
    const KnapsackInstance& instance, std::uint64_t steps, std::size_t count, std::uint64_t seed)>;

// The lazy chain started at the all-zeros vector.
LevelSampler chain_sampler(unsigned threads = 1);
// Exact uniform draws from the enumerated solution set; ignores `steps`.
// Draws are i.i.d. by construction, so they come sequentially from the
// single stream Stream(seed) rather than one substream per draw.
LevelSampler exact_sampler(std::size_t enumeration_cap = kDefaultEnumerationCap);

struct CountOptions {
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  LevelSampler sampler;  // chain_sampler() when empty
};

struct CountEstimate {
  double estimate = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  // Ratios of the replicate that produced the reported (lower) median,
  // per_level_ratios[i - 1] for level i.
  std::vector<double> per_level_ratios;
  std::vector<double> replicate_estimates;  // in replicate order
  std::uint64_t samples_per_level = 0;       // m = ceil(74 n / epsilon^2)
  std::vector<std::uint64_t> steps_per_sample;  // T_i = theorem_bound(i, epsilon / (8n))
  std::uint64_t replicates = 0;              // ceil(8 ln(2 / delta))
};

std::uint64_t samples_per_level(std::size_t n, double epsilon);
std::uint64_t median_replicates(double delta);

// Telescoping-product estimator: N = prod_i 1/r_i with r_i = Pr[x_i = 0] on
// Omega_i, each r_i estimated from m sampler draws. The whole product is
// repeated median_replicates(delta) times and the lower median returned.
// Replicate r, level i, draw k uses seed derive_seed(derive_seed(
// derive_seed(seed, r), i), k) for the chain sampler (the last step inside
// the sampler).
//
// Throws InputError for epsilon or delta outside (0, 1), and EstimatorError
// if a level sees no x_i = 0 draw at all (every true ratio is >= 1/2, so
// this means the sampler failed; use larger m or more steps).
CountEstimate approx_count(const KnapsackInstance& instance, const CountOptions& options);

}  // namespace knapmix
