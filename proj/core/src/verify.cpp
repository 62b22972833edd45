#include "knapmix/verify.hpp"

#include <algorithm>
#include <chrono>

#include "knapmix/canonical_paths.hpp"
#include "knapmix/error.hpp"
#include "knapmix/io.hpp"

namespace knapmix {

nlohmann::json RunReport::payload() const {
  return {{"command", command}, {"instance_digest", instance_digest}, {"seed", seed},
          {"outputs", outputs}};
}

std::vector<CheckResult> run_checks(const KnapsackInstance& instance, const VerifyOptions& options) {
  std::vector<CheckResult> checks;
  const std::size_t n = instance.size();
  const SolutionSet set = enumerate(instance, options.enumeration_cap);
  const std::uint64_t total = set.count();

  const std::uint64_t counted = exact_count(instance);
  checks.push_back({"exact_count_matches_enumeration", counted == total,
                    {{"enumerated", total}, {"exact_count", counted}}});

  // Path validity, recomputed state by state.
  std::uint64_t pairs = 0;
  std::string first_problem;
  const auto solutions = set.solutions();
  for (const auto& v : solutions) {
    for (const auto& w : solutions) {
      ++pairs;
      const auto problem = validate_path(instance, canonical_path(instance, v, w), v, w);
      if (!problem.empty() && first_problem.empty()) {
        first_problem = v.to_string() + "->" + w.to_string() + ": " + problem;
      }
    }
  }
  const CongestionReport report = congestion(instance, options.enumeration_cap, options.threads);
  checks.push_back({"canonical_paths_valid",
                    first_problem.empty() && report.invalid_paths == 0 && report.max_path_length <= n,
                    {{"pairs", pairs},
                     {"max_path_length", report.max_path_length},
                     {"first_problem", first_problem}}});

  const TraversalAudit traversal = audit_traversals_all(instance, options.enumeration_cap);
  nlohmann::json traversal_measured = {{"edges", traversal.edges}, {"traversals", traversal.traversals}};
  if (traversal.violation) {
    const auto& v = *traversal.violation;
    traversal_measured["violation"] = {{"v", v.v.to_string()},
                                    {"w", v.w.to_string()},
                                    {"edge", edge_label(v.edge, n)},
                                    {"property", v.property},
                                    {"position", v.position}};
  }
  checks.push_back({"traversal_structure", traversal.passed(), traversal_measured});

  const PrefixCountAudit prefix = audit_prefix_counts_all(instance, options.enumeration_cap);
  nlohmann::json prefix_measured = {{"checks", prefix.checks}, {"failures", prefix.failures}};
  if (prefix.first_violation) {
    const auto& v = *prefix.first_violation;
    prefix_measured["first_violation"] = {
        {"z", v.z.to_string()},
        {"beta", v.beta},
        {"rule", v.rule == Determination::equal ? "equal" : "complement"},
        {"count", v.count},
        {"bound", v.bound}};
  }
  checks.push_back({"prefix_counts", prefix.passed(), prefix_measured});

  checks.push_back({"max_load_le_2N", report.max_load <= 2 * total,
                    {{"max_load", report.max_load}, {"bound", 2 * total}}});
  checks.push_back({"flow_cost_le_4n", report.flow_cost <= 4.0 * static_cast<double>(n),
                    {{"flow_cost", report.flow_cost}, {"bound", 4 * n}}});

  const TransitionMatrix P = transition_matrix(instance, options.matrix_cap, options.enumeration_cap);
  checks.push_back({"transition_matrix_lazy_symmetric_stochastic",
                    P.is_symmetric() && P.has_nonnegative_entries() && P.has_unit_rows() &&
                        P.has_lazy_diagonal(),
                    {{"order", P.order()}, {"denominator", P.denominator()}}});
  checks.push_back({"uniform_is_stationary_exact", P.uniform_is_stationary(), nlohmann::json::object()});

  Spectrum spec;
  std::string spectrum_error;
  try {
    spec = spectrum(P);
  } catch (const InvariantError& e) {
    spectrum_error = e.what();
  }
  const bool spectrum_ok = spectrum_error.empty();
  const double lambda2 = spectrum_ok && spec.eigenvalues.size() > 1 ? spec.eigenvalues[1] : 0.0;
  const double lambda_min = spectrum_ok ? spec.eigenvalues.back() : 0.0;
  checks.push_back({"spectrum_nonnegative_and_cross_checked",
                    spectrum_ok && lambda_min >= -kEigenTolerance &&
                        (total == 1 || lambda2 < 1.0 - kEigenTolerance),
                    {{"gap", spec.gap},
                     {"lambda2", lambda2},
                     {"lambda_min", lambda_min},
                     {"power_lambda2", spec.power_lambda2},
                     {"error", spectrum_error}}});

  std::uint64_t bound_max = 0;
  for (double e : options.epsilons) bound_max = std::max(bound_max, theorem_bound(n, e));
  const auto times = mixing_times_all_starts(P, options.epsilons, bound_max);
  for (std::size_t k = 0; k < options.epsilons.size(); ++k) {
    const double e = options.epsilons[k];
    const std::uint64_t bound = theorem_bound(n, e);
    const std::uint64_t worst = *std::max_element(times[k].begin(), times[k].end());
    const double flow_bound = flow_mixing_bound(report.flow_cost, report.max_path_length, total, e);
    const std::string suffix = "(eps=" + nlohmann::json(e).dump() + ")";
    checks.push_back({"mixing_time_le_theorem_bound" + suffix, worst <= bound,
                      {{"epsilon", e},
                       {"max_tau_over_starts", worst == kNotMixed ? nlohmann::json(nullptr)
                                                                  : nlohmann::json(worst)},
                       {"tau_from_zero", times[k][0]},
                       {"theorem_bound", bound}}});
    checks.push_back({"theorem_bound_ge_flow_bound" + suffix,
                      static_cast<double>(bound) >= flow_bound,
                      {{"epsilon", e}, {"flow_bound", flow_bound}, {"theorem_bound", bound}}});
  }
  return checks;
}

RunReport verify(const KnapsackInstance& instance, const VerifyOptions& options,
                 std::string instance_digest) {
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.command = "verify";
  report.instance_digest = std::move(instance_digest);
  const auto checks = run_checks(instance, options);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}});
    report.passed = report.passed && c.passed;
  }
  report.outputs = {{"instance", to_json(instance)},
                    {"N", enumerate(instance, options.enumeration_cap).count()},
                    {"passed", report.passed},
                    {"checks", list}};
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace knapmix
