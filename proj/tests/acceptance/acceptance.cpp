// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if
// any criterion fails. Every criterion runs even after an earlier failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "knapmix/analysis.hpp"
#include "knapmix/canonical_paths.hpp"
#include "knapmix/chain.hpp"
#include "knapmix/counting.hpp"
#include "knapmix/error.hpp"
#include "knapmix/instance.hpp"
#include "knapmix/io.hpp"
#include "knapmix/rng.hpp"

namespace {

using knapmix::KnapsackInstance;
using knapmix::Solution;

constexpr std::uint64_t kInstanceBase = 20240611;
constexpr std::size_t kInstanceCount = 200;

struct Outcome {
  bool passed = false;
  std::string detail;
};

const std::vector<KnapsackInstance>& instance_set() {
  static const std::vector<KnapsackInstance> set = [] {
    std::vector<KnapsackInstance> out;
    for (std::size_t k = 0; k < kInstanceCount; ++k) {
      out.push_back(knapmix::random_instance(2 + k % 9, 50, knapmix::derive_seed(kInstanceBase, k)));
    }
    return out;
  }();
  return set;
}

std::string describe(const KnapsackInstance& k) { return knapmix::to_json(k).dump(); }

KnapsackInstance figure1() { return KnapsackInstance({5, 3, 2, 1}, 9); }

Outcome figure1_count() {
  const auto k = figure1();
  const auto set = knapmix::enumerate(k);
  const auto count = knapmix::exact_count(k);
  const bool excluded = !set.contains(Solution::from_string("1110")) &&
                        !set.contains(Solution::from_string("1111"));
  std::ostringstream out;
  out << "enumerate=" << set.count() << " exact_count=" << count;
  return {set.count() == 14 && count == 14 && excluded, out.str()};
}

Outcome paths_valid() {
  std::uint64_t pairs = 0;
  for (const auto& k : instance_set()) {
    const auto solutions = knapmix::enumerate(k).solutions();
    for (const auto& v : solutions) {
      for (const auto& w : solutions) {
        ++pairs;
        const auto problem = knapmix::validate_path(k, knapmix::canonical_path(k, v, w), v, w);
        if (!problem.empty()) {
          return {false, describe(k) + " " + v.to_string() + "->" + w.to_string() + ": " + problem};
        }
      }
    }
  }
  return {true, std::to_string(pairs) + " ordered pairs over " + std::to_string(kInstanceCount) +
                    " instances"};
}

Outcome congestion_bound() {
  double worst_ratio = 0.0;
  std::size_t checked = 0;
  std::size_t failing = 0;
  std::string first;
  for (const auto& k : instance_set()) {
    if (knapmix::exact_count(k) > 2048) continue;
    ++checked;
    const auto report = knapmix::congestion(k, knapmix::kDefaultEnumerationCap, 4);
    const auto n = static_cast<double>(k.size());
    const double ratio = static_cast<double>(report.max_load) /
                         (2.0 * static_cast<double>(std::max<std::uint64_t>(report.solution_count, 1)));
    worst_ratio = std::max(worst_ratio, ratio);
    if (report.max_load > 2 * report.solution_count || report.flow_cost > 4.0 * n) {
      ++failing;
      if (first.empty()) {
        first = describe(k) + " max_load=" + std::to_string(report.max_load) +
                " N=" + std::to_string(report.solution_count) +
                " flow_cost=" + std::to_string(report.flow_cost);
      }
    }
  }
  std::ostringstream out;
  out << failing << "/" << checked << " instances exceed the bound, largest max_load/(2N) "
      << worst_ratio;
  if (!first.empty()) out << "; first: " << first;
  return {failing == 0, out.str()};
}

Outcome traversal_structure() {
  std::uint64_t edges = 0;
  for (const auto& k : instance_set()) {
    if (k.size() > 8) continue;
    const auto audit = knapmix::audit_traversals_all(k);
    edges += audit.edges;
    if (!audit.passed()) {
      const auto& v = *audit.violation;
      return {false, describe(k) + " edge " + knapmix::edge_label(v.edge, k.size()) + " path " +
                         v.v.to_string() + "->" + v.w.to_string() + ": property " +
                         std::to_string(v.property) + " at " + std::to_string(v.position)};
    }
  }
  return {true, std::to_string(edges) + " edges audited"};
}

Outcome prefix_counts() {
  std::size_t failing_instances = 0;
  std::size_t audited = 0;
  std::uint64_t failures = 0;
  std::uint64_t checks = 0;
  std::string first;
  for (const auto& k : instance_set()) {
    if (k.size() > 8) continue;
    ++audited;
    const auto audit = knapmix::audit_prefix_counts_all(k);
    checks += audit.checks;
    failures += audit.failures;
    if (!audit.passed()) {
      ++failing_instances;
      if (first.empty()) {
        const auto& v = *audit.first_violation;
        std::ostringstream out;
        out << "first: " << describe(k) << " z=" << v.z.to_string() << " beta=" << v.beta
            << (v.rule == knapmix::Determination::equal ? " equal" : " complement")
            << " count=" << v.count << " > bound=" << v.bound;
        first = out.str();
      }
    }
  }
  std::ostringstream out;
  out << failures << "/" << checks << " checks fail on " << failing_instances << "/" << audited
      << " instances";
  if (!first.empty()) out << "; " << first;
  return {failures == 0, out.str()};
}

Outcome stationarity_spectrum() {
  double lowest = 1.0;
  std::size_t checked = 0;
  for (const auto& k : instance_set()) {
    if (knapmix::exact_count(k) > 1024) continue;
    ++checked;
    const auto P = knapmix::transition_matrix(k);
    if (!(P.is_symmetric() && P.has_nonnegative_entries() && P.has_unit_rows() &&
          P.has_lazy_diagonal() && P.uniform_is_stationary())) {
      return {false, describe(k) + " matrix property fails"};
    }
    knapmix::Spectrum s;
    try {
      s = knapmix::spectrum(P);
    } catch (const knapmix::InvariantError& e) {
      return {false, describe(k) + " " + e.what()};
    }
    lowest = std::min(lowest, s.eigenvalues.back());
    if (s.eigenvalues.back() < -1e-10) return {false, describe(k) + " negative eigenvalue"};
  }
  std::ostringstream out;
  out << checked << " matrices, smallest eigenvalue " << lowest;
  return {true, out.str()};
}

Outcome mixing_bound() {
  const std::array<double, 2> epsilons{0.1, 0.01};
  double tightest = 0.0;
  for (const auto& k : instance_set()) {
    const auto P = knapmix::transition_matrix(k);
    const auto bound_01 = knapmix::theorem_bound(k.size(), 0.01);
    const auto times = knapmix::mixing_times_all_starts(P, epsilons, bound_01);
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      const auto bound = knapmix::theorem_bound(k.size(), epsilons[e]);
      for (auto t : times[e]) {
        if (t > bound) {
          return {false, describe(k) + " tau=" +
                             (t == knapmix::kNotMixed ? std::string("unreached") : std::to_string(t)) +
                             " > " + std::to_string(bound)};
        }
        tightest = std::max(tightest, static_cast<double>(t) / static_cast<double>(bound));
      }
    }
  }
  const auto P = knapmix::transition_matrix(figure1());
  const double tv = knapmix::tv_distance_at(P, Solution::zeros(4), 473);
  std::ostringstream out;
  out << "largest tau/bound " << tightest << "; Figure 1 TV(473) = " << tv;
  return {tv <= 0.01 + 1e-10, out.str()};
}

Outcome sampler_uniformity() {
  constexpr std::size_t kDraws = 10000;
  const auto k = figure1();
  const auto draws = knapmix::sample(knapmix::ChainConfig(k, 8), 473, kDraws, 4);
  std::map<Solution, std::uint64_t> freq;
  for (const auto& s : draws) ++freq[s];
  const auto set = knapmix::enumerate(k);
  const double target = 1.0 / 14.0;
  const double alpha = 0.01;
  double worst = 0.0;
  bool ok = freq.size() == set.count();
  for (const auto& s : set.solutions()) {
    const auto c = static_cast<double>(freq[s]);
    const double p = c / kDraws;
    // Clopper-Pearson interval at 99%.
    const double lo = c == 0 ? 0.0 : boost::math::ibeta_inv(c, kDraws - c + 1, alpha / 2);
    const double hi = c == kDraws ? 1.0 : boost::math::ibeta_inv(c + 1, kDraws - c, 1 - alpha / 2);
    worst = std::max({worst, std::abs(p - target), target - lo, hi - target});
    ok = ok && std::abs(p - target) <= 0.02 && lo >= target - 0.02 && hi <= target + 0.02;
  }
  std::ostringstream out;
  out << "largest deviation incl. 99% interval " << worst;
  return {ok, out.str()};
}

Outcome approximate_counting() {
  const auto k = figure1();
  std::size_t inside = 0;
  std::ostringstream out;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    knapmix::CountOptions options;
    options.epsilon = 0.2;
    options.delta = 0.1;
    options.seed = trial;
    options.sampler = knapmix::chain_sampler(4);
    const double est = knapmix::approx_count(k, options).estimate;
    if (est >= 11.2 && est <= 16.8) ++inside;
  }
  out << inside << "/20 chain-driven trials in [11.2, 16.8]";
  bool exact_ok = true;
  for (std::size_t i = 0; i < kInstanceCount; ++i) {
    const auto& inst = instance_set()[i];
    knapmix::CountOptions options;
    options.epsilon = 0.2;
    options.delta = 0.1;
    options.seed = i;
    options.sampler = knapmix::exact_sampler();
    const double est = knapmix::approx_count(inst, options).estimate;
    const auto truth = static_cast<double>(knapmix::exact_count(inst));
    if (std::abs(est - truth) > 0.2 * truth) {
      exact_ok = false;
      out << "; exact sampler misses on " << describe(inst) << ": " << est << " vs " << truth;
      break;
    }
  }
  if (exact_ok) out << "; exact sampler within 0.2 on all " << kInstanceCount << " instances";
  return {inside >= 18 && exact_ok, out.str()};
}

#ifdef KNAPMIX_CLI_PATH
std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return "<popen failed>";
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) out.append(buffer.data(), got);
  const int status = pclose(pipe);
  return out + "\n<status " + std::to_string(status) + ">";
}

Outcome cli_determinism() {
  const std::string cli = KNAPMIX_CLI_PATH;
  const std::string fixture = KNAPMIX_FIXTURE_PATH;
  const std::string common = " --instance " + fixture + " --format json --seed 17 ";
  const std::vector<std::string> commands = {
      cli + common + "enumerate",
      cli + common + "sample --steps 473 --count 200 --threads 3",
      cli + common + "path --from 1100 --to 0011",
      cli + common + "audit 2>/dev/null",
      cli + common + "analyze --epsilon 0.01",
      cli + common + "count --exact",
      cli + common + "count --approx --epsilon 0.5 --delta 0.5",
      cli + common + "verify 2>/dev/null",
      cli + " --instance " + fixture + " --format csv --seed 17 sample --steps 50 --count 20",
      cli + " --seed 5 --format json generate --n 6 --max-weight 30",
  };
  for (const auto& c : commands) {
    const auto first = capture(c);
    const auto second = capture(c);
    if (first != second) return {false, "differs: " + c};
    if (first.find("<status 0>") == std::string::npos) return {false, "nonzero exit: " + c + "\n" + first};
  }
  return {true, std::to_string(commands.size()) + " commands replayed byte-identically"};
}
#else
Outcome cli_determinism() { return {false, "CLI not built (KNAPMIX_BUILD_TOOLS=OFF)"}; }
#endif

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 Figure 1 count is 14", figure1_count},
      {"AC2 canonical paths valid on all pairs", paths_valid},
      {"AC3 edge load <= 2N and flow cost <= 4n", congestion_bound},
      {"AC4 traversal structure on every edge (n <= 8)", traversal_structure},
      {"AC5 prefix-count bound for all z, beta (n <= 8)", prefix_counts},
      {"AC6 lazy symmetric stochastic matrix, uniform stationary, eigenvalues >= -1e-10",
       stationarity_spectrum},
      {"AC7 mixing time within n^3 ln(16/eps) from every start", mixing_bound},
      {"AC8 sampler frequencies within 0.02 of 1/14", sampler_uniformity},
      {"AC9 approximate counting accuracy", approximate_counting},
      {"AC10 CLI payloads byte-identical on replay", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    failed += outcome.passed ? 0 : 1;
    std::cout << (outcome.passed ? "[PASS] " : "[FAIL] ") << name << " (" << outcome.detail
              << "; " << seconds << " s)" << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
