#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "knapmix/analysis.hpp"
#include "knapmix/canonical_paths.hpp"
#include "knapmix/counting.hpp"
#include "knapmix/instance.hpp"

namespace knapmix {

// Instance files are JSON objects {"weights": [a_1, ..., a_n], "budget": b}
// with non-negative integers. Errors name the offending field; weight
// positions are 1-based.
KnapsackInstance parse_instance_json(std::string_view text);

// Raw text of an instance argument: inline JSON if it starts with '{'
// (after whitespace), otherwise the contents of the named file.
std::string read_instance_text(std::string_view path_or_json);

KnapsackInstance parse_instance(std::string_view path_or_json);

// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// Weights uniform in [1, max_weight], budget uniform in [0, sum of weights],
// drawn in that order from the stream derive_seed(seed, 0).
KnapsackInstance random_instance(std::size_t n, Weight max_weight, std::uint64_t seed);

nlohmann::json to_json(const KnapsackInstance& instance);
nlohmann::json to_json(const CanonicalPath& path);
// Loads keyed by "zbits>ybits".
nlohmann::json to_json(const CongestionReport& report);
nlohmann::json to_json(const CountEstimate& estimate);

}  // namespace knapmix
