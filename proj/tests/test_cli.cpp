// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the dcsr executable end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dcsr/matrix_io.hpp"
#include "dcsr/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dcsr_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string data(const std::string& name) {
  return std::string(DCSR_TEST_DATA_DIR) + "/" + name;
}

std::string work(const std::string& name) { return (workdir() / name).string(); }

Result run(const std::string& args, const std::string& env = "") {
  const std::string log = work("last_output.txt");
  const std::string cmd = env + " '" + std::string(DCSR_CLI_PATH) + "' " + args +
                          " > '" + log + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

nlohmann::json run_json(const std::string& args) {
  const Result r = run(args);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

const nlohmann::json& format_entry(const nlohmann::json& j, const std::string& f) {
  for (const auto& e : j["formats"]) {
    if (e["format"] == f) return e;
  }
  FAIL("format missing: " << f);
  return j;
}

std::string model_weights() {
  const std::string path = work("w276.mtx");
  if (!fs::exists(path)) {
    REQUIRE(run("gen --rows 276 --cols 276 --sparsity 0.9 --seed 7 --out " + path).code == 0);
  }
  return path;
}

}  // namespace

TEST_CASE("gen") {
  Result r = run("gen --rows 4 --cols 4 --sparsity 0 --seed 1 --out " + work("g4.mtx"));
  CHECK(r.code == 0);
  CHECK(r.out == "nnz 16\n");
  CHECK(dcsr::count_nonzeros(dcsr::load_matrix_market(work("g4.mtx"))) == 16);
  r = run("gen --rows 276 --cols 276 --sparsity 0.9 --seed 7 --out " + work("g276.mtx"));
  CHECK(r.code == 0);
  CHECK(r.out == "nnz 7618\n");
  CHECK(run("gen --rows 4 --cols 4 --sparsity 1.5 --seed 1 --out " + work("x.mtx")).code == 2);
  CHECK(run("gen --rows 4 --cols 4 --sparsity 1 --seed 1 --out " + work("x.mtx")).code == 2);
  CHECK(run("gen --rows 4 --cols 4 --sparsity 0.5 --out /nonexistent/dir/x.mtx").code == 2);
  CHECK(run("gen --rows 0 --cols 4 --sparsity 0.5 --out " + work("x.mtx")).code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("encode") {
  const auto j = run_json("encode --in " + data("example_1x16.mtx") +
                          " --format dcsr --group-size 4 --out " + work("ex.dcsr"));
  CHECK(format_entry(j, "dcsr")["values_bytes"] == 6);
  CHECK(format_entry(j, "dcsr")["padding_bytes"] == 0);
  CHECK(format_entry(j, "dcsr")["metadata_bytes"] == 26);
  CHECK(j["input"]["nonzeros"] == 6);
  CHECK(fs::file_size(work("ex.dcsr")) == 68);

  const auto c = run_json("encode --in " + data("example_2x2.mtx") + " --format csr");
  CHECK(format_entry(c, "csr")["total_bytes"] == 9);

  const Result csv = run("encode --in " + data("example_2x2.mtx") + " --format bcsr --report csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.find("format,bcsr,total_bytes,10\n") != std::string::npos);

  CHECK(run("encode --in " + data("example_2x2.mtx") + " --format zip").code == 2);
  CHECK(run("encode --in " + data("example_2x2.mtx") + " --group-size 3").code == 2);
  CHECK(run("encode --in " + work("missing.mtx")).code == 2);

  // 16-bit CSR limits surface as an error.
  REQUIRE(run("gen --rows 300 --cols 300 --sparsity 0 --seed 2 --out " + work("d300.mtx")).code == 0);
  const Result lim = run("encode --in " + work("d300.mtx") + " --format csr");
  CHECK(lim.code == 2);
  CHECK(lim.out.find("16-bit") != std::string::npos);
}

TEST_CASE("verify") {
  for (const char* f : {"dcsr", "csr", "bcsr", "ri"}) {
    const std::string enc = work(std::string("w.") + f);
    REQUIRE(run("encode --in " + model_weights() + " --format " + f + " --out " + enc).code == 0);
    const Result ok = run("verify --in " + model_weights() + " --encoded " + enc);
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok\n");
  }
  // A corrupted value byte decodes to a different matrix.
  REQUIRE(run("encode --in " + data("example_1x16.mtx") + " --group-size 4 --out " + work("ex.dcsr")).code == 0);
  auto bytes = dcsr::read_file_bytes(work("ex.dcsr"));
  bytes[60] = 9;
  dcsr::write_file_bytes(work("bad_value.dcsr"), bytes);
  Result r = run("verify --in " + data("example_1x16.mtx") + " --encoded " + work("bad_value.dcsr"));
  CHECK(r.code == 1);
  CHECK(r.out.find("row 0 col 0") != std::string::npos);
  // A corrupted structure byte fails to parse.
  bytes = dcsr::read_file_bytes(work("ex.dcsr"));
  bytes[5] = 3;
  dcsr::write_file_bytes(work("bad_header.dcsr"), bytes);
  CHECK(run("verify --in " + data("example_1x16.mtx") + " --encoded " + work("bad_header.dcsr")).code == 2);
  // The wrong source matrix.
  CHECK(run("verify --in " + model_weights() + " --encoded " + work("ex.dcsr")).code == 1);
  CHECK(run("verify --in " + data("example_1x16.mtx") + " --encoded " + data("example_1x16.mtx")).code == 2);
  CHECK(run("verify --in " + data("example_1x16.mtx") + " --encoded " + work("nope")).code == 2);
}

TEST_CASE("footprint") {
  const auto j = run_json("footprint --all --in " + model_weights());
  const double dcsr = format_entry(j, "dcsr")["compression_ratio"];
  const double csr = format_entry(j, "csr")["compression_ratio"];
  const double bcsr = format_entry(j, "bcsr")["compression_ratio"];
  CHECK(dcsr > csr);
  CHECK(csr > bcsr);
  CHECK(j["formats"].size() == 4);

  // Dense input: overhead exceeds savings, still no error.
  REQUIRE(run("gen --rows 64 --cols 64 --sparsity 0 --seed 3 --out " + work("dense64.mtx")).code == 0);
  const auto d = run_json("footprint --all --in " + work("dense64.mtx"));
  for (const auto& f : d["formats"]) CHECK(f["compression_ratio"].get<double>() < 1.0);

  // All-zero matrix: metadata is the row tables only.
  std::ofstream(work("zero.mtx")) << "%%MatrixMarket matrix coordinate integer general\n5 40 0\n";
  const auto z = run_json("footprint --in " + work("zero.mtx"));
  const auto& zf = format_entry(z, "dcsr");
  CHECK(zf["metadata_bytes"] == 6 * 4 + 6 * 4 + 5 * 2);
  CHECK(zf["metadata_parts"]["base_nibbles"] == 0);

  // Formats over the 16-bit limits are listed as skipped.
  const auto lim = run_json("footprint --all --in " + work("d300.mtx"));
  CHECK(lim["skipped_formats"].size() >= 1);
  CHECK(lim["skipped_formats"][0]["format"] == "csr");

  // CSV carries the same fields as JSON.
  const Result csv = run("footprint --all --report csv --in " + model_weights());
  REQUIRE(csv.code == 0);
  const auto fields = dcsr::parse_csv(csv.out);
  std::size_t checked = 0;
  for (const auto& f : fields) {
    if (f.record != "format" || f.field.find('.') != std::string::npos) continue;
    const auto& v = format_entry(j, f.name)[f.field];
    CHECK((v.is_string() ? v.get<std::string>() : v.dump()) == f.value);
    ++checked;
  }
  CHECK(checked == 4 * 6);
}

TEST_CASE("bench") {
  const std::string w = model_weights();
  const std::string common = " --weights " + w + " --pixels 49 --seed 5 --x-zero-point 3 --bias-seed 9"
                             " --requant-multiplier 5 --requant-shift 9 --output-zero-point -4";
  const auto dense = run_json("bench --kernel dense" + common);
  const auto vb = run_json("bench --kernel dcsr-vb" + common);
  const auto ib = run_json("bench --kernel dcsr-ib --repeat 3" + common);
  const auto ri = run_json("bench --kernel ri" + common);
  const auto spmv = run_json("bench --kernel dcsr-spmv" + common);
  auto mac = [](const nlohmann::json& j) {
    return j["kernels"][0]["counters"]["mac_lanes"].get<std::uint64_t>();
  };
  CHECK(dense["kernels"][0]["verified"] == true);
  CHECK(mac(vb) == mac(dense));
  CHECK(mac(ib) < mac(dense));
  CHECK(mac(ri) > mac(ib));
  CHECK(mac(spmv) == mac(ib));
  CHECK(ib["kernels"][0]["repeat"] == 3);
  CHECK(ib["input"]["seed"] == 5);
  const auto groups = format_entry(ib, "dcsr")["metadata_parts"]["intercept_deltas"];
  CHECK(ib["kernels"][0]["counters"]["group_recompositions"] == groups);

  // Threads do not change results or counters.
  const Result one = run("bench --kernel dcsr-ib --report csv" + common, "DCSR_THREADS=1");
  const Result four = run("bench --kernel dcsr-ib --report csv" + common, "DCSR_THREADS=4");
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  auto counters_only = [](const std::string& csv) {
    std::string out;
    for (const auto& f : dcsr::parse_csv(csv)) {
      if (f.field.rfind("counters.", 0) == 0) out += f.field + "=" + f.value + ";";
    }
    return out;
  };
  CHECK(counters_only(one.out) == counters_only(four.out));
  CHECK(run("bench --kernel dcsr-ib" + common, "DCSR_THREADS=zero").code == 2);

  // Activations from a dense binary file.
  REQUIRE(run("gen --rows 7 --cols 276 --sparsity 0 --seed 1 --binary --out " + work("act.bin")).code == 0);
  const auto from_file = run_json("bench --kernel dcsr-vb --weights " + w + " --activations " + work("act.bin"));
  CHECK(from_file["kernels"][0]["pixels"] == 7);
  CHECK_FALSE(from_file["input"].contains("seed"));

  REQUIRE(run("gen --rows 7 --cols 100 --sparsity 0 --seed 1 --binary --out " + work("act100.bin")).code == 0);
  CHECK(run("bench --kernel dcsr-vb --weights " + w + " --activations " + work("act100.bin")).code == 2);
  CHECK(run("bench --kernel dcsr-vb --weights " + w).code == 2);
  CHECK(run("bench --kernel nope --weights " + w + " --pixels 2").code == 2);
}
