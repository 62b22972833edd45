// knapmix: sample, route, audit and count 0-1 knapsack solutions.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or input error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "knapmix/analysis.hpp"
#include "knapmix/canonical_paths.hpp"
#include "knapmix/chain.hpp"
#include "knapmix/counting.hpp"
#include "knapmix/error.hpp"
#include "knapmix/instance.hpp"
#include "knapmix/io.hpp"
#include "knapmix/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string instance;
  std::uint64_t seed = 0;
  std::string format = "text";
  unsigned threads = 1;
  std::size_t enum_cap = knapmix::kDefaultEnumerationCap;
  std::size_t matrix_cap = knapmix::kDefaultMatrixCap;
  bool timing = false;
};

struct Loaded {
  knapmix::KnapsackInstance instance;
  std::string digest;
};

Loaded load(const Globals& g) {
  if (g.instance.empty()) throw knapmix::InputError("--instance is required");
  const std::string text = knapmix::read_instance_text(g.instance);
  return {knapmix::parse_instance_json(text), knapmix::sha256_hex(text)};
}

knapmix::Solution parse_state(const std::string& bits, const knapmix::KnapsackInstance& instance,
                              const char* what) {
  auto x = knapmix::Solution::from_string(bits);
  if (x.size() != instance.size()) {
    throw knapmix::InputError(std::string(what) + " has " + std::to_string(x.size()) +
                              " bits but the instance has n = " + std::to_string(instance.size()));
  }
  if (!knapmix::is_feasible(instance, x)) {
    throw knapmix::InputError(std::string(what) + " " + bits + " is infeasible");
  }
  return x;
}

void emit_report(const knapmix::RunReport& report, const Globals& g) {
  std::cout << report.payload().dump(2) << '\n';
  if (g.timing) std::cerr << "wall_time_s: " << report.wall_time << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_format(const Globals& g, std::initializer_list<const char*> allowed, const char* command) {
  for (const char* f : allowed) {
    if (g.format == f) return;
  }
  throw knapmix::InputError(std::string("--format ") + g.format + " is not supported by " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knapmix: lazy single-flip chain on 0-1 knapsack solutions"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--instance", g.instance, "Instance JSON file, or inline JSON object");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--enum-cap", g.enum_cap, "Largest n for exhaustive enumeration");
  app.add_option("--matrix-cap", g.matrix_cap, "Largest N for dense transition matrices");
  app.add_flag("--timing", g.timing, "Print wall time to stderr");

  auto* enumerate_cmd = app.add_subcommand("enumerate", "List all feasible solutions");

  auto* sample_cmd = app.add_subcommand("sample", "Draw end states of independent chain runs");
  std::uint64_t steps = 0;
  std::size_t count = 1;
  std::string start_bits;
  sample_cmd->add_option("--steps", steps, "Steps per run")->required();
  sample_cmd->add_option("--count", count, "Number of independent runs")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--start", start_bits, "Start state bit string (default all zeros)");

  auto* path_cmd = app.add_subcommand("path", "Canonical path between two solutions");
  std::string from_bits, to_bits;
  path_cmd->add_option("--from", from_bits, "Source bit string")->required();
  path_cmd->add_option("--to", to_bits, "Target bit string")->required();

  auto* audit_cmd = app.add_subcommand("audit", "Congestion report and path-structure audits");

  auto* analyze_cmd = app.add_subcommand("analyze", "Spectral gap and mixing time");
  double epsilon = 0.01;
  std::string tv_csv;
  analyze_cmd->add_option("--start", start_bits, "Start state (default all zeros)");
  analyze_cmd->add_option("--epsilon", epsilon, "Total variation target");
  analyze_cmd->add_option("--tv-curve", tv_csv, "Write t,tv rows to this CSV file");

  auto* count_cmd = app.add_subcommand("count", "Exact or approximate solution count");
  bool exact = false, approx = false;
  double delta = 0.1;
  std::string sampler_name = "chain";
  count_cmd->add_flag("--exact", exact, "Exact count (default)");
  count_cmd->add_flag("--approx", approx, "Sampler-driven estimate");
  count_cmd->add_option("--epsilon", epsilon, "Relative error target");
  count_cmd->add_option("--delta", delta, "Failure probability");
  count_cmd->add_option("--sampler", sampler_name, "Level sampler for --approx")
      ->check(CLI::IsMember({"chain", "exact"}));

  auto* verify_cmd = app.add_subcommand("verify", "Run the full audit suite");

  auto* generate_cmd = app.add_subcommand("generate", "Print a seeded random instance");
  std::size_t gen_n = 8;
  knapmix::Weight max_weight = 50;
  generate_cmd->add_option("--n", gen_n, "Number of items")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--max-weight", max_weight, "Weights are uniform in [1, W]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto started = std::chrono::steady_clock::now();

    if (*generate_cmd) {
      std::cout << knapmix::to_json(knapmix::random_instance(gen_n, max_weight, g.seed)).dump() << '\n';
      return kExitOk;
    }

    const Loaded in = load(g);
    const auto& instance = in.instance;
    knapmix::RunReport report;
    report.instance_digest = in.digest;
    report.seed = g.seed;

    if (*enumerate_cmd) {
      const auto set = knapmix::enumerate(instance, g.enum_cap);
      if (g.format == "json") {
        report.command = "enumerate";
        nlohmann::json list = nlohmann::json::array();
        for (const auto& x : set.solutions()) list.push_back(x.to_string());
        report.outputs = {{"N", set.count()}, {"solutions", list}};
        report.wall_time = seconds_since(started);
        emit_report(report, g);
      } else {
        if (g.format == "csv") std::cout << "index,bits\n";
        const auto all = set.solutions();
        for (std::size_t i = 0; i < all.size(); ++i) {
          if (g.format == "csv") std::cout << i << ',';
          std::cout << all[i].to_string() << '\n';
        }
      }
      return kExitOk;
    }

    if (*sample_cmd) {
      const auto start = start_bits.empty() ? knapmix::Solution::zeros(instance.size())
                                            : parse_state(start_bits, instance, "--start");
      const knapmix::ChainConfig config(instance, g.seed, start);
      const auto samples = knapmix::sample(config, steps, count, g.threads);
      if (g.format == "json") {
        report.command = "sample";
        nlohmann::json list = nlohmann::json::array();
        for (const auto& x : samples) list.push_back(x.to_string());
        report.outputs = {{"steps", steps}, {"count", count}, {"start", start.to_string()},
                          {"samples", list}};
        report.wall_time = seconds_since(started);
        emit_report(report, g);
      } else {
        if (g.format == "csv") std::cout << "replicate,bits\n";
        for (std::size_t r = 0; r < samples.size(); ++r) {
          if (g.format == "csv") std::cout << r << ',';
          std::cout << samples[r].to_string() << '\n';
        }
      }
      return kExitOk;
    }

    if (*path_cmd) {
      require_format(g, {"text", "json"}, "path");
      const auto v = parse_state(from_bits, instance, "--from");
      const auto w = parse_state(to_bits, instance, "--to");
      const auto path = knapmix::canonical_path(instance, v, w);
      if (g.format == "json") {
        report.command = "path";
        report.outputs = knapmix::to_json(path);
        report.wall_time = seconds_since(started);
        emit_report(report, g);
      } else {
        std::cout << "flips:";
        for (const auto& f : path.flips()) std::cout << ' ' << f.to_string();
        std::cout << "\nstates:";
        for (const auto& x : path.states()) std::cout << ' ' << x.to_string();
        std::cout << '\n';
      }
      return kExitOk;
    }

    if (*audit_cmd) {
      require_format(g, {"text", "json"}, "audit");
      const auto congestion = knapmix::congestion(instance, g.enum_cap, g.threads);
      const auto traversal = knapmix::audit_traversals_all(instance, g.enum_cap);
      const auto prefix = knapmix::audit_prefix_counts_all(instance, g.enum_cap);
      const std::size_t n = instance.size();
      const bool paths_ok = congestion.invalid_paths == 0 && congestion.max_path_length <= n;
      const bool load_ok = congestion.max_load <= 2 * congestion.solution_count;
      const bool flow_ok = congestion.flow_cost <= 4.0 * static_cast<double>(n);
      report.command = "audit";
      report.outputs = knapmix::to_json(congestion);
      report.outputs["checks"] = {{"canonical_paths", paths_ok},
                                  {"traversal_structure", traversal.passed()},
                                  {"prefix_counts", prefix.passed()},
                                  {"prefix_count_failures", prefix.failures},
                                  {"max_load_le_2N", load_ok},
                                  {"flow_cost_le_4n", flow_ok}};
      report.passed = paths_ok && traversal.passed() && prefix.passed() && load_ok && flow_ok;
      report.wall_time = seconds_since(started);
      emit_report(report, g);
      auto line = [](const char* name, bool ok) {
        std::cerr << (ok ? "PASS " : "FAIL ") << name << '\n';
      };
      line("canonical paths valid, length <= n", paths_ok);
      line("traversal structure on every edge", traversal.passed());
      line("prefix counts <= (2N)^((n-beta)/n)", prefix.passed());
      line("max load <= 2N", load_ok);
      line("flow cost <= 4n", flow_ok);
      return report.passed ? kExitOk : kExitCheckFailed;
    }

    if (*analyze_cmd) {
      require_format(g, {"text", "json"}, "analyze");
      const auto start = start_bits.empty() ? knapmix::Solution::zeros(instance.size())
                                            : parse_state(start_bits, instance, "--start");
      const auto P = knapmix::transition_matrix(instance, g.matrix_cap, g.enum_cap);
      const auto spectrum = knapmix::spectrum(P);
      const std::uint64_t bound = knapmix::theorem_bound(instance.size(), epsilon);
      const std::uint64_t tau = knapmix::empirical_mixing_time(P, start, epsilon);
      const auto congestion = knapmix::congestion(instance, g.enum_cap, g.threads);
      report.command = "analyze";
      report.outputs = {{"start", start.to_string()},
                        {"epsilon", epsilon},
                        {"N", P.order()},
                        {"gap", spectrum.gap},
                        {"tau", tau == knapmix::kNotMixed ? nlohmann::json(nullptr) : nlohmann::json(tau)},
                        {"theorem_bound", bound},
                        {"flow_cost", congestion.flow_cost}};
      if (!tv_csv.empty()) {
        std::ofstream out(tv_csv);
        if (!out) throw knapmix::InputError("cannot write " + tv_csv);
        const auto curve = knapmix::tv_curve(P, P.index_of(start), bound);
        out << "t,tv\n" << std::setprecision(17);
        for (std::size_t t = 0; t < curve.size(); ++t) out << t << ',' << curve[t] << '\n';
      }
      report.wall_time = seconds_since(started);
      emit_report(report, g);
      return kExitOk;
    }

    if (*count_cmd) {
      require_format(g, {"text", "json"}, "count");
      if (exact && approx) throw knapmix::InputError("--exact and --approx are exclusive");
      report.command = "count";
      if (!approx) {
        report.outputs = {{"count", knapmix::exact_count(instance)}};
      } else {
        knapmix::CountOptions options;
        options.epsilon = epsilon;
        options.delta = delta;
        options.seed = g.seed;
        options.sampler = sampler_name == "exact" ? knapmix::exact_sampler(g.enum_cap)
                                                  : knapmix::chain_sampler(g.threads);
        report.outputs = knapmix::to_json(knapmix::approx_count(instance, options));
        report.outputs["sampler"] = sampler_name;
      }
      report.wall_time = seconds_since(started);
      emit_report(report, g);
      return kExitOk;
    }

    if (*verify_cmd) {
      require_format(g, {"text", "json"}, "verify");
      knapmix::VerifyOptions options;
      options.enumeration_cap = g.enum_cap;
      options.matrix_cap = g.matrix_cap;
      options.threads = g.threads;
      auto verified = knapmix::verify(instance, options, in.digest);
      verified.seed = g.seed;
      emit_report(verified, g);
      for (const auto& c : verified.outputs.at("checks")) {
        std::cerr << (c.at("passed").get<bool>() ? "PASS " : "FAIL ")
                  << c.at("name").get<std::string>() << '\n';
      }
      return verified.passed ? kExitOk : kExitCheckFailed;
    }
  } catch (const knapmix::CapacityError& e) {
    std::cerr << "error: " << e.what() << " (use a smaller instance or raise --enum-cap/--matrix-cap)\n";
    return kExitUsage;
  } catch (const knapmix::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const knapmix::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const knapmix::EstimatorError& e) {
    std::cerr << "estimator failure: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const knapmix::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
