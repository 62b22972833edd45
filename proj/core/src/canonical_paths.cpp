#include "knapmix/canonical_paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "knapmix/error.hpp"

namespace knapmix {

namespace {

// Scan state over n <= 63 positions packed as big-endian keys: position i
// is bit (n - 1 - i).
struct KeyScan {
  std::size_t n;
  std::uint64_t mask(std::size_t i) const { return std::uint64_t{1} << (n - 1 - i); }
  bool bit(std::uint64_t key, std::size_t i) const { return (key & mask(i)) != 0; }
  // Mask of 0-based positions [first, last).
  std::uint64_t range(std::size_t first, std::size_t last) const {
    std::uint64_t m = 0;
    for (std::size_t i = first; i < last; ++i) m |= mask(i);
    return m;
  }
};

struct FlipEvent {
  std::uint64_t before = 0;  // z
  std::uint64_t after = 0;   // y
  std::size_t index = 0;
  FlipRole role = FlipRole::scan;
  ZoneDecomposition zones;   // after the flip
  std::uint64_t flipped_before = 0;  // positions flipped strictly before this edge
};

// The canonical path scan. Calls on_flip(const FlipEvent&) for every flip in
// order and returns the number of flips.
template <typename OnFlip>
std::size_t scan_path(const KnapsackInstance& instance, std::uint64_t v, std::uint64_t w,
                      OnFlip&& on_flip) {
  const std::size_t n = instance.size();
  const KeyScan ks{n};
  const auto weights = instance.weights();
  const Weight budget = instance.budget();

  std::uint64_t x = v;
  Weight load = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ks.bit(x, i)) load += weights[i];
  }

  std::uint64_t matched = 0;  // pre-flipped positions ahead of the scan
  std::uint64_t flipped = 0;
  std::size_t highest = 0;    // 1-based highest flipped position
  std::size_t count = 0;

  // First position at or after p still needing action by the scan.
  auto next_pending = [&](std::size_t p) {
    while (p < n && ((matched & ks.mask(p)) != 0 || ks.bit(x, p) == ks.bit(w, p))) ++p;
    return p;
  };

  std::size_t scan = next_pending(0);

  auto emit = [&](std::size_t index, FlipRole role) {
    FlipEvent ev;
    ev.before = x;
    ev.index = index;
    ev.role = role;
    ev.flipped_before = flipped;
    x ^= ks.mask(index);
    ev.after = x;
    flipped |= ks.mask(index);
    highest = std::max(highest, index + 1);
    const std::size_t matched_end = role == FlipRole::pre_flip ? scan : next_pending(index + 1);
    ev.zones = ZoneDecomposition{matched_end, std::max(highest, matched_end)};
    ++count;
    on_flip(static_cast<const FlipEvent&>(ev));
  };

  while (scan < n) {
    const std::size_t i = scan;
    if (!ks.bit(x, i)) {
      // 0 -> 1: free slack ahead of the scan first if the item does not fit.
      std::size_t j = i + 1;
      while (load + weights[i] > budget) {
        while (j < n && !(ks.bit(x, j) && !ks.bit(w, j))) ++j;
        if (j == n) {
          throw InvariantError("canonical path stalled at position " + std::to_string(i + 1) +
                               ": no slack left to free");
        }
        load -= weights[j];
        matched |= ks.mask(j);
        emit(j, FlipRole::pre_flip);
        ++j;
      }
      load += weights[i];
    } else {
      load -= weights[i];
    }
    emit(i, FlipRole::scan);
    scan = next_pending(i + 1);
  }
  if (x != w) throw InvariantError("canonical path scan did not reach its target");
  return count;
}

void require_key_width(const KnapsackInstance& instance) {
  if (instance.size() > 63) {
    throw CapacityError("canonical paths are built over packed keys; n must be <= 63");
  }
}

// Dense key -> canonical index table for small n, binary search otherwise.
class StateIndex {
 public:
  explicit StateIndex(const SolutionSet& set) : set_(set) {
    if (set.dimension() <= kDenseBits) {
      dense_.assign(std::size_t{1} << set.dimension(), kAbsent);
      for (std::size_t idx = 0; idx < set.count(); ++idx) {
        dense_[set.keys()[idx]] = static_cast<std::uint32_t>(idx);
      }
    }
  }
  std::size_t operator()(std::uint64_t key) const {
    if (!dense_.empty()) {
      const auto v = dense_[key];
      return v == kAbsent ? set_.count() : v;
    }
    return set_.index_of(key);
  }

 private:
  static constexpr std::size_t kDenseBits = 24;
  static constexpr std::uint32_t kAbsent = 0xFFFFFFFFU;
  const SolutionSet& set_;
  std::vector<std::uint32_t> dense_;
};

// Runs fn(begin, end) over [0, count) split across `threads` workers.
template <typename Fn>
void parallel_ranges(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
}

// Checks the four traversal properties; returns 0 when all hold, otherwise
// the number of the first failing property and sets `position` (1-based).
int check_traversal(const KeyScan& ks, std::uint64_t v, std::uint64_t w, const FlipEvent& ev,
                    std::size_t& position) {
  const std::size_t n = ks.n;
  const std::size_t k = ev.zones.matched_end;
  const std::size_t l = ev.zones.heap_end;
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint64_t m = ks.mask(p);
    int failed = 0;
    if (p >= l) {
      if (((v ^ ev.before) & m) != 0) failed = 1;
    } else if (p < k) {
      if (((w ^ ev.after) & m) != 0) failed = 2;
    } else if ((ev.flipped_before & m) != 0) {
      if ((ev.before & m) != 0 || (v & m) == 0) failed = 3;
    } else if (((v ^ ev.before) & m) != 0) {
      failed = 4;
    }
    if (failed != 0) {
      position = p + 1;
      return failed;
    }
  }
  return 0;
}

}  // namespace

std::string Flip::to_string() const {
  return (direction == FlipDirection::positive ? "+" : "-") + std::to_string(index + 1);
}

ZoneDecomposition CanonicalPath::zones_at(std::size_t j) const {
  if (j >= zones_.size()) {
    throw InputError("step " + std::to_string(j) + " outside path of length " +
                     std::to_string(length()));
  }
  return zones_[j];
}

ZoneDecomposition zones_at(const CanonicalPath& path, std::size_t j) { return path.zones_at(j); }

CanonicalPath canonical_path(const KnapsackInstance& instance, const Solution& v,
                             const Solution& w) {
  require_key_width(instance);
  if (!is_feasible(instance, v)) throw PreconditionError("path source " + v.to_string() + " is infeasible");
  if (!is_feasible(instance, w)) throw PreconditionError("path target " + w.to_string() + " is infeasible");
  const std::size_t n = instance.size();

  CanonicalPath path;
  path.states_.push_back(v);
  path.zones_.push_back(v == w ? ZoneDecomposition{n, n} : ZoneDecomposition{0, 0});
  scan_path(instance, v.key(), w.key(), [&](const FlipEvent& ev) {
    const bool positive = (ev.after & KeyScan{n}.mask(ev.index)) != 0;
    path.flips_.push_back(Flip{ev.index, positive ? FlipDirection::positive : FlipDirection::negative});
    path.roles_.push_back(ev.role);
    path.states_.push_back(Solution::from_key(ev.after, n));
    path.zones_.push_back(ev.zones);
  });
  return path;
}

std::string validate_path(const KnapsackInstance& instance, const CanonicalPath& path,
                          const Solution& v, const Solution& w) {
  const std::size_t n = instance.size();
  const auto& states = path.states();
  const auto& flips = path.flips();
  if (states.size() != flips.size() + 1) return "state/flip count mismatch";
  if (states.front() != v) return "path does not start at v";
  if (states.back() != w) return "path does not end at w";
  if (flips.size() > n) return "path longer than n";
  std::vector<bool> seen(n, false);
  std::size_t last_matched = 0;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (!is_feasible(instance, states[j])) return "infeasible state at step " + std::to_string(j);
    const auto zones = path.zones_at(j);
    if (zones.matched_end > zones.heap_end || zones.heap_end > n) {
      return "malformed zones at step " + std::to_string(j);
    }
    if (zones.matched_end < last_matched) return "matched prefix shrank at step " + std::to_string(j);
    last_matched = zones.matched_end;
    for (std::size_t p = 0; p < zones.matched_end; ++p) {
      if (states[j][p] != w[p]) return "matched zone disagrees with w at step " + std::to_string(j);
    }
    for (std::size_t p = zones.heap_end; p < n; ++p) {
      if (states[j][p] != v[p]) return "untouched zone disagrees with v at step " + std::to_string(j);
    }
    if (j == 0) continue;
    const Flip& f = flips[j - 1];
    if (f.index >= n) return "flip index out of range";
    if (seen[f.index]) return "position " + std::to_string(f.index + 1) + " flipped twice";
    seen[f.index] = true;
    if (states[j] != states[j - 1].flipped(f.index)) return "step " + std::to_string(j) + " is not a single flip";
    if ((f.direction == FlipDirection::positive) != states[j][f.index]) return "flip direction mismatch";
  }
  return {};
}

std::string edge_label(const Edge& edge, std::size_t n) {
  const Solution z = Solution::from_key(edge.from_key, n);
  return z.to_string() + ">" + z.flipped(edge.index).to_string();
}

CongestionReport congestion(const KnapsackInstance& instance, std::size_t enumeration_cap,
                            unsigned threads) {
  require_key_width(instance);
  const SolutionSet set = enumerate(instance, enumeration_cap);
  const std::size_t n = instance.size();
  const std::size_t count = set.count();
  const StateIndex index_of(set);
  const KeyScan ks{n};
  const auto keys = set.keys();

  struct Partial {
    std::vector<std::uint64_t> load;
    std::size_t max_length = 0;
    std::uint64_t invalid = 0;
  };
  const std::size_t workers = std::max(1U, threads);
  std::vector<Partial> partials(workers);
  parallel_ranges(count, threads, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    Partial& part = partials[worker];
    part.load.assign(count * n, 0);
    for (std::size_t vi = begin; vi < end; ++vi) {
      const std::uint64_t v = keys[vi];
      for (std::size_t wi = 0; wi < count; ++wi) {
        if (wi == vi) continue;
        const std::uint64_t w = keys[wi];
        std::uint64_t seen = 0;
        std::size_t last_matched = 0;
        bool ok = true;
        const std::size_t length = scan_path(instance, v, w, [&](const FlipEvent& ev) {
          const std::size_t zi = index_of(ev.before);
          const std::size_t yi = index_of(ev.after);
          if (zi == count || yi == count || (seen & ks.mask(ev.index)) != 0 ||
              ev.zones.matched_end < last_matched) {
            ok = false;
          }
          seen |= ks.mask(ev.index);
          last_matched = ev.zones.matched_end;
          if (zi != count) ++part.load[zi * n + ev.index];
        });
        if (length > n) ok = false;
        part.max_length = std::max(part.max_length, length);
        if (!ok) ++part.invalid;
      }
    }
  });

  CongestionReport report;
  report.dimension = n;
  report.solution_count = count;
  std::vector<std::uint64_t> load(count * n, 0);
  for (const auto& part : partials) {
    if (part.load.empty()) continue;
    for (std::size_t e = 0; e < load.size(); ++e) load[e] += part.load[e];
    report.max_path_length = std::max(report.max_path_length, part.max_length);
    report.invalid_paths += part.invalid;
  }
  for (std::size_t zi = 0; zi < count; ++zi) {
    for (std::size_t i = 0; i < n; ++i) {
      if (index_of(keys[zi] ^ ks.mask(i)) == count) continue;  // not an edge
      const std::uint64_t l = load[zi * n + i];
      report.loads.emplace(Edge{keys[zi], i}, l);
      report.max_load = std::max(report.max_load, l);
    }
  }
  report.flow_cost = count == 0 ? 0.0
                                : 2.0 * static_cast<double>(n) * static_cast<double>(report.max_load) /
                                      static_cast<double>(count);
  return report;
}

namespace {

TraversalAudit traversal_sweep(const KnapsackInstance& instance, std::size_t enumeration_cap,
                         const Edge* only) {
  require_key_width(instance);
  const SolutionSet set = enumerate(instance, enumeration_cap);
  const std::size_t n = instance.size();
  const KeyScan ks{n};
  const auto keys = set.keys();

  TraversalAudit audit;
  if (only != nullptr) {
    if (only->index >= n || set.index_of(only->from_key) == set.count() ||
        set.index_of(only->from_key ^ ks.mask(only->index)) == set.count()) {
      throw InputError("(z, y) is not an edge of the transition graph");
    }
    audit.edges = 1;
  } else {
    for (auto z : keys) {
      for (std::size_t i = 0; i < n; ++i) {
        if (set.index_of(z ^ ks.mask(i)) != set.count()) ++audit.edges;
      }
    }
  }
  for (auto v : keys) {
    for (auto w : keys) {
      if (v == w) continue;
      scan_path(instance, v, w, [&](const FlipEvent& ev) {
        if (audit.violation) return;
        if (only != nullptr && (ev.before != only->from_key || ev.index != only->index)) return;
        ++audit.traversals;
        std::size_t position = 0;
        if (const int failed = check_traversal(ks, v, w, ev, position); failed != 0) {
          audit.violation = TraversalViolation{Solution::from_key(v, n), Solution::from_key(w, n),
                                            Edge{ev.before, ev.index}, failed, position};
        }
      });
      if (audit.violation) return audit;
    }
  }
  return audit;
}

}  // namespace

bool audit_traversal(const KnapsackInstance& instance, const Edge& edge, std::size_t enumeration_cap) {
  return traversal_sweep(instance, enumeration_cap, &edge).passed();
}

TraversalAudit audit_traversals_all(const KnapsackInstance& instance, std::size_t enumeration_cap) {
  return traversal_sweep(instance, enumeration_cap, nullptr);
}

std::uint64_t prefix_count(const KnapsackInstance& instance, const Solution& prefix_source,
                           std::size_t beta, Determination rule) {
  const std::size_t n = instance.size();
  if (prefix_source.size() != n) throw InputError("prefix source has the wrong length");
  if (beta > n) throw InputError("prefix length beta exceeds n");
  Weight fixed = 0;
  for (std::size_t i = 0; i < beta; ++i) {
    const bool bit = prefix_source[i] != (rule == Determination::complement);
    if (bit) fixed += instance.weight(i);
  }
  return exact_count_suffix(instance, beta, instance.budget() - fixed);
}

double prefix_count_bound(std::uint64_t solution_count, std::size_t n, std::size_t beta) {
  return std::pow(2.0 * static_cast<double>(solution_count),
                  static_cast<double>(n - beta) / static_cast<double>(n));
}

namespace {

// count <= (2N)^((n-beta)/n), compared in log space with a 1e-9 guard for
// the boundary cases that hold with equality.
bool within_prefix_bound(std::uint64_t count, std::uint64_t total, std::size_t n, std::size_t beta) {
  if (count <= 1) return true;  // the bound is at least 1
  const double lhs = static_cast<double>(n) * std::log(static_cast<double>(count));
  const double rhs = static_cast<double>(n - beta) * std::log(2.0 * static_cast<double>(total));
  return lhs <= rhs + 1e-9;
}

}  // namespace

bool audit_prefix_count(const KnapsackInstance& instance, const Solution& z, std::size_t beta,
                      std::size_t enumeration_cap) {
  const std::size_t n = instance.size();
  if (n > enumeration_cap) {
    throw CapacityError("enumeration cap is n <= " + std::to_string(enumeration_cap));
  }
  if (!is_feasible(instance, z)) throw PreconditionError("z must be feasible");
  if (beta > n) throw InputError("prefix length beta exceeds n");
  const std::uint64_t total = exact_count(instance);
  for (auto rule : {Determination::equal, Determination::complement}) {
    if (!within_prefix_bound(prefix_count(instance, z, beta, rule), total, n, beta)) return false;
  }
  return true;
}

PrefixCountAudit audit_prefix_counts_all(const KnapsackInstance& instance, std::size_t enumeration_cap) {
  const SolutionSet set = enumerate(instance, enumeration_cap);
  const std::size_t n = instance.size();
  const std::uint64_t total = set.count();
  PrefixCountAudit audit;
  for (const auto& z : set.solutions()) {
    for (std::size_t beta = 0; beta <= n; ++beta) {
      for (auto rule : {Determination::equal, Determination::complement}) {
        ++audit.checks;
        const std::uint64_t c = prefix_count(instance, z, beta, rule);
        if (!within_prefix_bound(c, total, n, beta)) {
          ++audit.failures;
          if (!audit.first_violation) {
            audit.first_violation = PrefixCountViolation{z, beta, rule, c, prefix_count_bound(total, n, beta)};
          }
        }
      }
    }
  }
  return audit;
}

}  // namespace knapmix
