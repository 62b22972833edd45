#include "knapmix/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "knapmix/error.hpp"
#include "knapmix/rng.hpp"

namespace knapmix {

namespace {

Weight read_integer(const nlohmann::json& value, const std::string& field) {
  if (value.is_number_unsigned()) {
    const auto v = value.get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<Weight>::max())) {
      throw InputError(field + " overflows 63 bits");
    }
    return static_cast<Weight>(v);
  }
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 0) throw InputError(field + " is negative (" + std::to_string(v) + ")");
    return v;
  }
  throw InputError(field + " must be a non-negative integer");
}

}  // namespace

KnapsackInstance parse_instance_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("instance must be a JSON object");
  if (!doc.contains("weights")) throw InputError("missing field \"weights\"");
  if (!doc.contains("budget")) throw InputError("missing field \"budget\"");
  const auto& weights = doc.at("weights");
  if (!weights.is_array()) throw InputError("field \"weights\" must be an array");
  if (weights.empty()) throw InputError("field \"weights\" is empty: n >= 1 required");
  std::vector<Weight> a;
  a.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    a.push_back(read_integer(weights[i], "weight " + std::to_string(i + 1)));
  }
  const Weight b = read_integer(doc.at("budget"), "field \"budget\"");
  return KnapsackInstance(std::move(a), b);
}

std::string read_instance_text(std::string_view path_or_json) {
  const auto first = path_or_json.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && path_or_json[first] == '{') {
    return std::string(path_or_json);
  }
  std::ifstream in{std::string(path_or_json), std::ios::binary};
  if (!in) throw InputError("cannot read instance file \"" + std::string(path_or_json) + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

KnapsackInstance parse_instance(std::string_view path_or_json) {
  return parse_instance_json(read_instance_text(path_or_json));
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

KnapsackInstance random_instance(std::size_t n, Weight max_weight, std::uint64_t seed) {
  if (n == 0) throw InputError("random instance needs n >= 1");
  if (max_weight < 1) throw InputError("maximum weight must be at least 1");
  Stream stream(derive_seed(seed, 0));
  std::vector<Weight> weights(n);
  Weight total = 0;
  for (auto& a : weights) {
    a = 1 + static_cast<Weight>(stream.below(static_cast<std::uint64_t>(max_weight)));
    total += a;
  }
  const auto budget = static_cast<Weight>(stream.below(static_cast<std::uint64_t>(total) + 1));
  return KnapsackInstance(std::move(weights), budget);
}

nlohmann::json to_json(const KnapsackInstance& instance) {
  return {{"weights", std::vector<Weight>(instance.weights().begin(), instance.weights().end())},
          {"budget", instance.budget()}};
}

nlohmann::json to_json(const CanonicalPath& path) {
  nlohmann::json flips = nlohmann::json::array();
  nlohmann::json states = nlohmann::json::array();
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& f : path.flips()) flips.push_back(f.to_string());
  for (std::size_t j = 0; j < path.states().size(); ++j) {
    states.push_back(path.states()[j].to_string());
    const auto z = path.zones_at(j);
    zones.push_back({{"matched_end", z.matched_end}, {"heap_end", z.heap_end}});
  }
  return {{"from", path.from().to_string()},
          {"to", path.to().to_string()},
          {"length", path.length()},
          {"flips", flips},
          {"states", states},
          {"zones", zones}};
}

nlohmann::json to_json(const CongestionReport& report) {
  nlohmann::json loads = nlohmann::json::object();
  for (const auto& [edge, load] : report.loads) loads[edge_label(edge, report.dimension)] = load;
  return {{"n", report.dimension},
          {"N", report.solution_count},
          {"max_load", report.max_load},
          {"flow_cost", report.flow_cost},
          {"max_path_length", report.max_path_length},
          {"invalid_paths", report.invalid_paths},
          {"loads", loads}};
}

nlohmann::json to_json(const CountEstimate& estimate) {
  return {{"estimate", estimate.estimate},
          {"epsilon", estimate.epsilon},
          {"delta", estimate.delta},
          {"per_level_ratios", estimate.per_level_ratios},
          {"replicate_estimates", estimate.replicate_estimates},
          {"samples_per_level", estimate.samples_per_level},
          {"steps_per_sample", estimate.steps_per_sample},
          {"replicates", estimate.replicates}};
}

}  // namespace knapmix
