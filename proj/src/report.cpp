// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/report.hpp"

#include <sstream>

#include "dcsr/error.hpp"

namespace dcsr {
namespace {

nlohmann::json footprint_json(const FootprintBreakdown& f) {
  nlohmann::json parts = nlohmann::json::object();
  for (const auto& [name, bytes] : f.metadata_parts) parts[name] = bytes;
  return {{"format", f.format},
          {"dense_bytes", f.dense_bytes},
          {"values_bytes", f.values_bytes},
          {"padding_bytes", f.padding_bytes},
          {"metadata_bytes", f.metadata_bytes},
          {"total_bytes", f.total_bytes},
          {"compression_ratio", f.compression_ratio()},
          {"metadata_parts", parts}};
}

nlohmann::json kernel_json(const KernelRun& k) {
  nlohmann::json counters = nlohmann::json::object();
  for (const auto& [name, count] : k.counters.snapshot()) counters[name] = count;
  return {{"kernel", k.kernel},     {"pixels", k.pixels},
          {"repeat", k.repeat},     {"verified", k.verified},
          {"counters", counters},   {"duration_ms", k.duration_ms}};
}

// Strings as-is, numbers and booleans as JSON text.
std::string scalar_text(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json to_json(const Report& report) {
  nlohmann::json input = {{"source", report.input.source},
                          {"rows", report.input.rows},
                          {"cols", report.input.cols},
                          {"nonzeros", report.input.nonzeros},
                          {"sparsity", report.input.sparsity},
                          {"group_size", report.input.group_size},
                          {"ri_bits", report.input.ri_bits}};
  if (report.input.seed) input["seed"] = *report.input.seed;
  nlohmann::json formats = nlohmann::json::array();
  for (const auto& f : report.formats) formats.push_back(footprint_json(f));
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"format", s.format}, {"reason", s.reason}});
  }
  nlohmann::json kernels = nlohmann::json::array();
  for (const auto& k : report.kernels) kernels.push_back(kernel_json(k));
  return {{"tool", report.tool},
          {"version", report.version},
          {"input", input},
          {"formats", formats},
          {"skipped_formats", skipped},
          {"kernels", kernels}};
}

std::vector<ReportField> flatten(const Report& report) {
  const nlohmann::json j = to_json(report);
  std::vector<ReportField> out;
  out.push_back({"tool", "", "tool", scalar_text(j["tool"])});
  out.push_back({"tool", "", "version", scalar_text(j["version"])});
  for (const auto& [key, value] : j["input"].items()) {
    out.push_back({"input", "", key, scalar_text(value)});
  }
  auto add_record = [&](const char* record, const nlohmann::json& obj,
                        const char* name_key) {
    const std::string name = obj[name_key].get<std::string>();
    for (const auto& [key, value] : obj.items()) {
      if (key == name_key) continue;
      if (value.is_object()) {
        for (const auto& [sub, v] : value.items()) {
          out.push_back({record, name, key + "." + sub, scalar_text(v)});
        }
      } else {
        out.push_back({record, name, key, scalar_text(value)});
      }
    }
  };
  for (const auto& f : j["formats"]) add_record("format", f, "format");
  for (const auto& s : j["skipped_formats"]) add_record("skipped", s, "format");
  for (const auto& k : j["kernels"]) add_record("kernel", k, "kernel");
  return out;
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "record,name,field,value\n";
  for (const ReportField& f : flatten(report)) {
    out << csv_escape(f.record) << ',' << csv_escape(f.name) << ','
        << csv_escape(f.field) << ',' << csv_escape(f.value) << '\n';
  }
  return out.str();
}

std::vector<ReportField> parse_csv(const std::string& csv) {
  std::vector<ReportField> out;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool header = true;
  auto end_row = [&] {
    cells.push_back(cell);
    cell.clear();
    if (header) {
      const std::vector<std::string> expected = {"record", "name", "field", "value"};
      if (cells != expected) throw FormatError("unexpected CSV header");
      header = false;
    } else if (cells.size() == 4) {
      out.push_back({cells[0], cells[1], cells[2], cells[3]});
    } else if (!(cells.size() == 1 && cells[0].empty())) {
      throw FormatError("CSV row does not have 4 cells");
    }
    cells.clear();
  };
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char ch = csv[i];
    if (quoted) {
      if (ch == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch == '\n') {
      end_row();
    } else {
      cell += ch;
    }
  }
  if (!cell.empty() || !cells.empty()) end_row();
  return out;
}

}  // namespace dcsr
