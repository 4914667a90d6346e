#pragma once

// Run configuration: one JSON document drives model, experiment, budget, and
// seed. Parsing is strict (unknown keys rejected, invariants named in
// errors); serialization is canonical (sorted keys, defaults made explicit)
// so a config has a stable FNV-1a-64 digest embedded in every output file.

#include <cstdint>
#include <string>
#include <string_view>

#include "experiments.hpp"
#include "laws.hpp"

namespace mbpnpi {

struct RunConfig {
  ModelSpec model;
  std::string regime = "auto";  // "auto" | "I" | "II" | "III" | "IV"
  ExperimentParams params;      // seed/workers live here too
  std::string out_dir = "out";
};

// Parses and validates; throws ConfigError with a "path: reason" message
// naming the violated invariant.
RunConfig parse_config(const std::string& text);

// Canonical JSON serialization: reparsing yields an identical config, and
// serializing that reparse yields byte-identical text.
std::string canonical_config(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view data);

// 16 lowercase hex digits of fnv1a64(canonical_config(cfg)).
std::string config_digest(const RunConfig& cfg);

}  // namespace mbpnpi
