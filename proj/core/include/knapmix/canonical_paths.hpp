#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knapmix/instance.hpp"

namespace knapmix {

enum class FlipDirection : std::uint8_t { positive, negative };  // 0->1, 1->0

struct Flip {
  std::size_t index = 0;  // 0-based position; printed 1-based
  FlipDirection direction = FlipDirection::positive;

  // "+3" / "-4" with a 1-based position.
  std::string to_string() const;
  friend bool operator==(const Flip&, const Flip&) = default;
};

// Index intervals of the scan at one instant (1-based, inclusive):
// matched 1..matched_end, heap matched_end+1..heap_end, untouched
// heap_end+1..n.
struct ZoneDecomposition {
  std::size_t matched_end = 0;
  std::size_t heap_end = 0;
  friend bool operator==(const ZoneDecomposition&, const ZoneDecomposition&) = default;
};

// Role a flip plays in the left-to-right scan.
enum class FlipRole : std::uint8_t {
  scan,      // matches the position the scan is currently on
  pre_flip,  // negative flip ahead of the scan, made to free slack
};

class CanonicalPath {
 public:
  const Solution& from() const noexcept { return states_.front(); }
  const Solution& to() const noexcept { return states_.back(); }
  const std::vector<Flip>& flips() const noexcept { return flips_; }
  const std::vector<FlipRole>& roles() const noexcept { return roles_; }
  // states()[j] is the state after j flips; states().size() == flips().size() + 1.
  const std::vector<Solution>& states() const noexcept { return states_; }
  std::size_t length() const noexcept { return flips_.size(); }

  // Zones after j flips, from the recorded scan log. j = 0 with a non-empty
  // path is the instant before the scan acts, (0, 0). j = length() is the
  // completed scan, (n, n).
  ZoneDecomposition zones_at(std::size_t j) const;

 private:
  friend CanonicalPath canonical_path(const KnapsackInstance&, const Solution&, const Solution&);

  std::vector<Flip> flips_;
  std::vector<FlipRole> roles_;
  std::vector<Solution> states_;
  std::vector<ZoneDecomposition> zones_;  // zones_[j] for j = 0..length()
};

// Left-to-right matching scan from v to w. At position i: 1->0 mismatches are
// flipped; a 0->1 mismatch is flipped when feasible, otherwise positions
// j > i with current 1 and target 0 are flipped to 0 in ascending order
// until the flip at i fits, then i is flipped. Pre-flipped positions are
// matched and skipped by the scan.
//
// Throws PreconditionError if v or w is infeasible, and InvariantError if
// the scan runs out of positions to free (which would contradict the
// existence of the path).
CanonicalPath canonical_path(const KnapsackInstance& instance, const Solution& v,
                             const Solution& w);

ZoneDecomposition zones_at(const CanonicalPath& path, std::size_t j);

// A directed edge (z, y) of the transition graph, y = z with `index` flipped.
struct Edge {
  std::uint64_t from_key = 0;
  std::size_t index = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed edge as "zbits>ybits".
std::string edge_label(const Edge& edge, std::size_t n);

struct CongestionReport {
  std::size_t dimension = 0;
  std::uint64_t solution_count = 0;  // N
  // Load of every directed edge of the transition graph, including zeros.
  std::map<Edge, std::uint64_t> loads;
  std::uint64_t max_load = 0;
  // 2n * max_load / N, i.e. max_e phi'(e)/c(e) with phi'(e) = load/N^2 and
  // c(e) = 1/(2nN).
  double flow_cost = 0.0;
  // Longest canonical path over all ordered pairs.
  std::size_t max_path_length = 0;
  // Pairs whose path violated validity (infeasible state, wrong end, length
  // > n, repeated index, decreasing matched prefix). Zero on success.
  std::uint64_t invalid_paths = 0;
};

// Routes every ordered pair v != w along its canonical path. Θ(N^2 n).
CongestionReport congestion(const KnapsackInstance& instance,
                            std::size_t enumeration_cap = kDefaultEnumerationCap,
                            unsigned threads = 1);

// Checks the path invariants used by the congestion audit. Returns an empty
// string when valid, otherwise a description of the first violation.
std::string validate_path(const KnapsackInstance& instance, const CanonicalPath& path,
                          const Solution& v, const Solution& w);

// Structural properties at the instant a path traverses (z, y), with the
// zones taken after the flip:
//   (1) untouched positions: v equals z,
//   (2) matched positions: w equals y,
//   (3) heap positions pre-flipped before this edge: 0 in z, 1 in v,
//   (4) heap positions not flipped so far: v equals z.
struct TraversalViolation {
  Solution v;
  Solution w;
  Edge edge;
  int property = 0;
  std::size_t position = 0;  // 1-based
};

// Audits one edge over every ordered pair routed through it. Throws
// InputError if (z, y) is not an edge of the transition graph.
bool audit_traversal(const KnapsackInstance& instance, const Edge& edge,
                  std::size_t enumeration_cap = kDefaultEnumerationCap);

struct TraversalAudit {
  std::uint64_t edges = 0;
  std::uint64_t traversals = 0;
  std::optional<TraversalViolation> violation;
  bool passed() const noexcept { return !violation; }
};

// Audits every edge in a single sweep over all ordered pairs.
TraversalAudit audit_traversals_all(const KnapsackInstance& instance,
                             std::size_t enumeration_cap = kDefaultEnumerationCap);

// Prefix-count bound: for the first beta entries fixed to z's prefix (and,
// separately, to its complement), the number of feasible completions is at
// most (2N)^((n - beta)/n).
enum class Determination : std::uint8_t { equal, complement };

struct PrefixCountViolation {
  Solution z;
  std::size_t beta = 0;
  Determination rule = Determination::equal;
  std::uint64_t count = 0;
  double bound = 0.0;
};

// Feasible solutions whose first `beta` entries are the given prefix.
std::uint64_t prefix_count(const KnapsackInstance& instance, const Solution& prefix_source,
                           std::size_t beta, Determination rule);

double prefix_count_bound(std::uint64_t solution_count, std::size_t n, std::size_t beta);

bool audit_prefix_count(const KnapsackInstance& instance, const Solution& z, std::size_t beta,
                      std::size_t enumeration_cap = kDefaultEnumerationCap);

struct PrefixCountAudit {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::optional<PrefixCountViolation> first_violation;
  bool passed() const noexcept { return failures == 0; }
};

// All feasible z, all beta in [0, n], both determination rules.
PrefixCountAudit audit_prefix_counts_all(const KnapsackInstance& instance,
                                     std::size_t enumeration_cap = kDefaultEnumerationCap);

}  // namespace knapmix
