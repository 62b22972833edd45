#include "knapmix/chain.hpp"

#include <algorithm>
#include <thread>

#include "knapmix/error.hpp"

namespace knapmix {

ChainConfig::ChainConfig(KnapsackInstance inst, std::uint64_t s)
    : ChainConfig(inst, s, Solution::zeros(inst.size())) {}

ChainConfig::ChainConfig(KnapsackInstance inst, std::uint64_t s, Solution st)
    : instance(std::move(inst)), seed(s), start(std::move(st)) {
  if (!is_feasible(instance, start)) {
    throw PreconditionError("chain start state " + start.to_string() + " is infeasible");
  }
}

StepOutcome apply_draw(const KnapsackInstance& instance, Solution& state, Weight& load,
                       std::uint64_t u) {
  const std::size_t n = instance.size();
  if (u >= n) return StepOutcome::held;
  const Weight a = instance.weight(u);
  if (state[u]) {
    state.flip(u);
    load -= a;
    return StepOutcome::moved;
  }
  if (load + a > instance.budget()) return StepOutcome::rejected;
  state.flip(u);
  load += a;
  return StepOutcome::moved;
}

Solution step(const KnapsackInstance& instance, const Solution& state, std::uint64_t u) {
  if (u >= 2 * instance.size()) throw InputError("draw must lie in [0, 2n)");
  Weight load = weight(instance, state);
  if (load > instance.budget()) throw PreconditionError("step from an infeasible state");
  Solution next = state;
  apply_draw(instance, next, load, u);
  return next;
}

namespace {

void count(StepCounters* counters, StepOutcome outcome) {
  if (counters == nullptr) return;
  switch (outcome) {
    case StepOutcome::moved: ++counters->moved; break;
    case StepOutcome::held: ++counters->held; break;
    case StepOutcome::rejected: ++counters->rejected; break;
  }
}

}  // namespace

Trajectory run(const ChainConfig& config, std::uint64_t steps) {
  const auto& instance = config.instance;
  Stream stream(derive_seed(config.seed, 0));
  Trajectory trajectory;
  trajectory.states.reserve(static_cast<std::size_t>(steps) + 1);
  trajectory.states.push_back(config.start);
  Solution state = config.start;
  Weight load = weight(instance, state);
  const std::uint64_t outcomes = 2 * instance.size();
  for (std::uint64_t t = 0; t < steps; ++t) {
    count(&trajectory.counters, apply_draw(instance, state, load, stream.below(outcomes)));
    trajectory.states.push_back(state);
  }
  return trajectory;
}

Solution run_to_end(const KnapsackInstance& instance, const Solution& start, std::uint64_t steps,
                    Stream& stream, StepCounters* counters) {
  Solution state = start;
  Weight load = weight(instance, state);
  if (load > instance.budget()) throw PreconditionError("walk from an infeasible state");
  const std::uint64_t outcomes = 2 * instance.size();
  for (std::uint64_t t = 0; t < steps; ++t) {
    count(counters, apply_draw(instance, state, load, stream.below(outcomes)));
  }
  return state;
}

std::vector<Solution> sample(const ChainConfig& config, std::uint64_t steps, std::size_t count,
                             unsigned threads) {
  if (count == 0) throw InputError("sample count must be at least 1");
  std::vector<Solution> out(count);
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Stream stream(derive_seed(config.seed, r));
      out[r] = run_to_end(config.instance, config.start, steps, stream);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, count);
  if (workers == 1) {
    worker(0, count);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
  }
  return out;
}

}  // namespace knapmix
