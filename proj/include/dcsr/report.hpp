// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Benchmark / footprint reports. JSON is the canonical schema; CSV is a
// long-form projection with one `record,name,field,value` line per scalar.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcsr/engine.hpp"
#include "dcsr/footprint.hpp"

namespace dcsr {

inline constexpr const char* kToolVersion = "0.1.0";

struct InputDescriptor {
  std::string source;  // path of the input file, or "generated"
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nonzeros = 0;
  double sparsity = 0.0;  // measured
  std::optional<std::uint64_t> seed;
  std::size_t group_size = 16;
  unsigned ri_bits = 4;
};

struct KernelRun {
  std::string kernel;
  std::size_t pixels = 0;
  std::size_t repeat = 1;
  Counters counters;  // of a single repetition
  bool verified = false;
  double duration_ms = 0.0;  // informational, not deterministic
};

// A format that could not represent the input, e.g. a 16-bit index overflow.
struct SkippedFormat {
  std::string format;
  std::string reason;
};

struct Report {
  std::string tool = "dcsr";
  std::string version = kToolVersion;
  InputDescriptor input;
  std::vector<FootprintBreakdown> formats;
  std::vector<SkippedFormat> skipped;
  std::vector<KernelRun> kernels;
};

struct ReportField {
  std::string record;
  std::string name;
  std::string field;
  std::string value;  // strings verbatim, other scalars as JSON text

  bool operator==(const ReportField&) const = default;
};

nlohmann::json to_json(const Report& report);
std::vector<ReportField> flatten(const Report& report);
std::string to_csv(const Report& report);
std::vector<ReportField> parse_csv(const std::string& csv);

}  // namespace dcsr
