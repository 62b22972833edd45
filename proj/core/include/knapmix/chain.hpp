#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "knapmix/instance.hpp"
#include "knapmix/rng.hpp"

namespace knapmix {

// The lazy single-flip chain on the feasible set of an instance.
//
// One step draws u uniformly from {0, ..., 2n-1}. u >= n holds; u < n
// proposes flipping position u, accepted iff the result is feasible.
// Hence P(x, y) = 1/(2n) for every feasible single-flip neighbour y and
// P(x, x) = 1/2 + (#infeasible proposals)/(2n).
struct ChainConfig {
  ChainConfig(KnapsackInstance instance, std::uint64_t seed);
  ChainConfig(KnapsackInstance instance, std::uint64_t seed, Solution start);

  KnapsackInstance instance;
  std::uint64_t seed = 0;
  Solution start;
};

enum class StepOutcome : std::uint8_t { moved, held, rejected };

struct StepCounters {
  std::uint64_t moved = 0;
  std::uint64_t held = 0;      // lazy branch, u >= n
  std::uint64_t rejected = 0;  // proposal would leave the feasible set
};

// Applies the move encoded by draw u in [0, 2n) to `state`, whose current
// weight is `load`; both are updated in place.
StepOutcome apply_draw(const KnapsackInstance& instance, Solution& state, Weight& load,
                       std::uint64_t u);

// One chain step from a feasible state using the given draw u in [0, 2n).
Solution step(const KnapsackInstance& instance, const Solution& state, std::uint64_t u);

struct Trajectory {
  std::vector<Solution> states;  // states[0] is the start
  StepCounters counters;
  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

// Runs `steps` transitions on substream 0 of config.seed, i.e. the stream
// seeded by derive_seed(config.seed, 0).
Trajectory run(const ChainConfig& config, std::uint64_t steps);

// End state of a single walk; same draws as run() but without recording.
Solution run_to_end(const KnapsackInstance& instance, const Solution& start,
                    std::uint64_t steps, Stream& stream, StepCounters* counters = nullptr);

// End states of `count` independent walks; replicate r uses the stream
// seeded by derive_seed(config.seed, r). Replicates are distributed over
// `threads` workers; the result does not depend on the thread count.
std::vector<Solution> sample(const ChainConfig& config, std::uint64_t steps, std::size_t count,
                             unsigned threads = 1);

}  // namespace knapmix
