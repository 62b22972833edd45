#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "knapmix/analysis.hpp"
#include "knapmix/instance.hpp"

namespace knapmix {

// Output of one CLI command. `outputs` is the command payload; replaying a
// command with the same instance bytes, flags and seed reproduces it
// exactly. wall_time is kept out of the payload for that reason.
struct RunReport {
  std::string command;
  std::string instance_digest;  // SHA-256 of the instance text
  std::uint64_t seed = 0;
  nlohmann::json outputs;
  double wall_time = 0.0;  // seconds
  bool passed = true;

  // {"command", "instance_digest", "seed", "outputs"}; no timing.
  nlohmann::json payload() const;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json measured;
};

struct VerifyOptions {
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  std::size_t matrix_cap = kDefaultMatrixCap;
  unsigned threads = 1;
  std::vector<double> epsilons{0.1, 0.01};
};

// Runs every module-level audit on one instance: exact vs enumerated count,
// canonical-path validity and lengths, traversal-structure and prefix-count
// audits, congestion and flow-cost bounds, transition-matrix properties,
// spectrum, and measured vs theoretical mixing time from every start.
// Throws CapacityError when the instance exceeds a cap.
std::vector<CheckResult> run_checks(const KnapsackInstance& instance,
                                    const VerifyOptions& options = {});

RunReport verify(const KnapsackInstance& instance, const VerifyOptions& options = {},
                 std::string instance_digest = {});

}  // namespace knapmix
