// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// dcsr command-line front end: gen, encode, verify, footprint, bench.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "dcsr/baselines.hpp"
#include "dcsr/container.hpp"
#include "dcsr/error.hpp"
#include "dcsr/kernels.hpp"
#include "dcsr/matrix_io.hpp"
#include "dcsr/report.hpp"

using namespace dcsr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOracle = 3;

// Raised when a sparse kernel disagrees with the dense oracle.
struct OracleMismatch : Error {
  using Error::Error;
};

using AnyEncoded = std::variant<DcsrMatrix, CsrMatrix16, BcsrMatrix, RiMatrix>;

std::size_t worker_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DCSR_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v < 1) throw InvalidArgument("DCSR_THREADS must be >= 1");
      n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw InvalidArgument(std::string("bad DCSR_THREADS value: ") + cap);
    }
  }
  return n;
}

InputDescriptor describe(const std::string& source, const DenseMatrixI8& m,
                         std::size_t g, unsigned ri_bits) {
  InputDescriptor in;
  in.source = source;
  in.rows = static_cast<std::size_t>(m.rows());
  in.cols = static_cast<std::size_t>(m.cols());
  in.nonzeros = count_nonzeros(m);
  in.sparsity = 1.0 - static_cast<double>(in.nonzeros) /
                          static_cast<double>(in.rows * in.cols);
  in.group_size = g;
  in.ri_bits = ri_bits;
  return in;
}

AnyEncoded encode_as(const std::string& format, const DenseMatrixI8& m,
                     std::size_t g, unsigned ri_bits) {
  if (format == "dcsr") return encode_matrix(m, g);
  if (format == "csr") return encode_csr(m);
  if (format == "bcsr") return encode_bcsr(m);
  if (format == "ri") return encode_ri(m, ri_bits);
  throw InvalidArgument("unknown format: " + format);
}

FootprintBreakdown footprint_of(const AnyEncoded& e) {
  return std::visit([](const auto& x) { return footprint(x); }, e);
}

std::vector<std::uint8_t> serialize_any(const AnyEncoded& e) {
  return std::visit([](const auto& x) { return serialize(x); }, e);
}

AnyEncoded deserialize_any(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("encoded file too short");
  const std::string magic(bytes.begin(), bytes.begin() + 4);
  if (magic == "DCSR") return deserialize(bytes);
  if (magic == "CSRX") return deserialize_csr(bytes);
  if (magic == "BCSR") return deserialize_bcsr(bytes);
  if (magic == "RIDX") return deserialize_ri(bytes);
  throw FormatError("unrecognized encoded file magic");
}

DenseMatrixI8 decode_any(const AnyEncoded& e) {
  return std::visit(
      [](const auto& x) -> DenseMatrixI8 {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, DcsrMatrix>) return decode_matrix(x);
        if constexpr (std::is_same_v<T, CsrMatrix16>) return decode_csr(x);
        if constexpr (std::is_same_v<T, BcsrMatrix>) return decode_bcsr(x);
        if constexpr (std::is_same_v<T, RiMatrix>) return decode_ri(x);
      },
      e);
}

void emit(const Report& report, const std::string& format) {
  if (format == "csv") {
    std::cout << to_csv(report);
  } else {
    std::cout << to_json(report).dump(2) << '\n';
  }
}

// ---- gen ----

struct GenOptions {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool binary = false;
};

int run_gen(const GenOptions& o) {
  const DenseMatrixI8 m =
      generate_uniform_sparse({o.rows, o.cols, o.sparsity, o.seed});
  if (o.binary) {
    store_dense_binary(m, o.out);
  } else {
    store_matrix_market(m, o.out);
  }
  std::cout << "nnz " << count_nonzeros(m) << '\n';
  return kExitOk;
}

// ---- encode ----

struct EncodeOptions {
  std::string in;
  std::string format = "dcsr";
  std::size_t group_size = 16;
  unsigned ri_bits = 4;
  std::string out;
  std::string report = "json";
};

int run_encode(const EncodeOptions& o) {
  const DenseMatrixI8 m = load_matrix_market(o.in);
  const AnyEncoded e = encode_as(o.format, m, o.group_size, o.ri_bits);
  if (!o.out.empty()) write_file_bytes(o.out, serialize_any(e));
  Report r;
  r.input = describe(o.in, m, o.group_size, o.ri_bits);
  r.formats.push_back(footprint_of(e));
  emit(r, o.report);
  return kExitOk;
}

// ---- verify ----

struct VerifyOptions {
  std::string in;
  std::string encoded;
};

int run_verify(const VerifyOptions& o) {
  const DenseMatrixI8 m = load_matrix_market(o.in);
  const auto bytes = read_file_bytes(o.encoded);
  DenseMatrixI8 d;
  try {
    d = decode_any(deserialize_any(bytes));
  } catch (const ConstraintError& e) {
    throw FormatError(e.what());
  }
  if (d.rows() != m.rows() || d.cols() != m.cols()) {
    std::cout << "mismatch: dimensions " << d.rows() << "x" << d.cols()
              << " vs " << m.rows() << "x" << m.cols() << '\n';
    return kExitMismatch;
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (d(r, c) != m(r, c)) {
        std::cout << "mismatch at row " << r << " col " << c << ": expected "
                  << int{m(r, c)} << ", decoded " << int{d(r, c)} << '\n';
        return kExitMismatch;
      }
    }
  }
  std::cout << "ok\n";
  return kExitOk;
}

// ---- footprint ----

struct FootprintOptions {
  std::string in;
  bool all = false;
  std::string format = "dcsr";
  std::size_t group_size = 16;
  unsigned ri_bits = 4;
  std::string report = "json";
};

int run_footprint(const FootprintOptions& o) {
  const DenseMatrixI8 m = load_matrix_market(o.in);
  Report r;
  r.input = describe(o.in, m, o.group_size, o.ri_bits);
  const std::vector<std::string> formats =
      o.all ? std::vector<std::string>{"dcsr", "csr", "bcsr", "ri"}
            : std::vector<std::string>{o.format};
  for (const std::string& f : formats) {
    try {
      r.formats.push_back(footprint_of(encode_as(f, m, o.group_size, o.ri_bits)));
    } catch (const FormatLimitError& e) {
      if (!o.all) throw;
      r.skipped.push_back({f, e.what()});
    }
  }
  emit(r, o.report);
  return kExitOk;
}

// ---- bench ----

struct BenchOptions {
  std::string weights;
  std::string activations;
  std::size_t pixels = 0;
  std::uint64_t seed = 0;
  std::string kernel = "dcsr-ib";
  std::size_t group_size = 16;
  unsigned ri_bits = 4;
  std::size_t repeat = 1;
  std::string report = "json";
  std::int32_t x_zero_point = 0;
  std::optional<std::uint64_t> bias_seed;
  std::int32_t multiplier = 1;
  unsigned shift = 0;
  std::int32_t output_zero_point = 0;
};

VectorI32 make_bias(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int32_t> d(-32768, 32767);
  VectorI32 b(static_cast<Eigen::Index>(rows));
  for (auto& v : b) v = d(rng);
  return b;
}

int run_bench(const BenchOptions& o) {
  const DenseMatrixI8 w = load_matrix_market(o.weights);
  DenseMatrixI8 a;
  if (!o.activations.empty()) {
    a = load_dense_binary(o.activations);
  } else {
    if (o.pixels == 0) throw InvalidArgument("--pixels must be >= 1");
    a = generate_dense(o.pixels, static_cast<std::size_t>(w.cols()), o.seed);
  }
  if (a.cols() != w.cols()) {
    throw InvalidArgument("activations have " + std::to_string(a.cols()) +
                          " channels, weights have " +
                          std::to_string(w.cols()) + " columns");
  }
  if (o.repeat == 0) throw InvalidArgument("--repeat must be >= 1");
  if (o.x_zero_point < -128 || o.x_zero_point > 127) {
    throw InvalidArgument("--x-zero-point must be in [-128, 127]");
  }
  if (o.shift > 31) throw InvalidArgument("--requant-shift must be <= 31");
  if (o.output_zero_point < -32768 || o.output_zero_point > 32767) {
    throw InvalidArgument("--output-zero-point must fit 16 bits");
  }
  RequantSpec rq{o.multiplier, static_cast<std::uint8_t>(o.shift),
                 static_cast<std::int16_t>(o.output_zero_point)};
  rq.validate();

  const VectorI32 bias =
      o.bias_seed ? make_bias(static_cast<std::size_t>(w.rows()), *o.bias_seed)
                  : VectorI32();
  const std::size_t threads = worker_threads();
  const MatrixI32 expected = dense_spmm(w, a, o.x_zero_point, bias);

  std::optional<DcsrMatrix> d;
  std::optional<RiMatrix> ri;
  if (o.kernel.rfind("dcsr", 0) == 0) d = encode_matrix(w, o.group_size);
  if (o.kernel == "ri") ri = encode_ri(w, o.ri_bits);

  auto run_once = [&](VectorEngine& engine) -> MatrixI32 {
    if (o.kernel == "dense") return dense_spmm(w, a, o.x_zero_point, bias, engine, threads);
    if (o.kernel == "dcsr-vb") return dcsr_spmm_vb(*d, a, o.x_zero_point, bias, engine, threads);
    if (o.kernel == "dcsr-ib") return dcsr_spmm_ib(*d, a, o.x_zero_point, bias, engine, threads);
    if (o.kernel == "ri") return ri_spmm(*ri, a, o.x_zero_point, bias, engine, threads);
    // dcsr-spmv: one direct-extraction pass per pixel.
    MatrixI32 out(a.rows(), w.rows());
    for (Eigen::Index p = 0; p < a.rows(); ++p) {
      const VectorI8 x = a.row(p).transpose();
      out.row(p) = dcsr_spmv(*d, x, o.x_zero_point, bias, engine, threads).transpose();
    }
    return out;
  };

  KernelRun run;
  run.kernel = o.kernel;
  run.pixels = static_cast<std::size_t>(a.rows());
  run.repeat = o.repeat;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < o.repeat; ++i) {
    VectorEngine engine(o.group_size);
    const MatrixI32 got = run_once(engine);
    if (got != expected || requantize(got, rq) != requantize(expected, rq)) {
      throw OracleMismatch("kernel " + o.kernel + " disagrees with the dense oracle");
    }
    if (i == 0) {
      run.counters = engine.counters();
    } else if (!(engine.counters() == run.counters)) {
      throw OracleMismatch("counters differ between repetitions");
    }
  }
  run.duration_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count() /
                    static_cast<double>(o.repeat);
  run.verified = true;

  Report r;
  r.input = describe(o.weights, w, o.group_size, o.ri_bits);
  if (o.activations.empty()) r.input.seed = o.seed;
  if (d) r.formats.push_back(footprint(*d));
  if (ri) r.formats.push_back(footprint(*ri));
  r.kernels.push_back(run);
  emit(r, o.report);
  return kExitOk;
}

const std::vector<std::string> kReportFormats = {"json", "csv"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dCSR sparse-matrix codec tools"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a uniform random sparse int8 matrix");
  gen_cmd->add_option("--rows", gen.rows)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--sparsity", gen.sparsity)->required()->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_flag("--binary", gen.binary, "Write the dense binary layout instead of Matrix Market");

  EncodeOptions enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode a Matrix Market file");
  enc_cmd->add_option("--in", enc.in)->required();
  enc_cmd->add_option("--format", enc.format)
      ->check(CLI::IsMember({"dcsr", "csr", "bcsr", "ri"}));
  enc_cmd->add_option("--group-size", enc.group_size)
      ->check(CLI::IsMember({2, 4, 8, 16, 32}));
  enc_cmd->add_option("--ri-bits", enc.ri_bits)->check(CLI::Range(2, 8));
  enc_cmd->add_option("--out", enc.out);
  enc_cmd->add_option("--report", enc.report)->check(CLI::IsMember(kReportFormats));

  VerifyOptions ver;
  auto* ver_cmd = app.add_subcommand("verify", "Check an encoded file against its source");
  ver_cmd->add_option("--in", ver.in)->required();
  ver_cmd->add_option("--encoded", ver.encoded)->required();

  FootprintOptions fp;
  auto* fp_cmd = app.add_subcommand("footprint", "Report per-format memory footprint");
  fp_cmd->add_option("--in", fp.in)->required();
  fp_cmd->add_flag("--all", fp.all, "Report every format");
  fp_cmd->add_option("--format", fp.format)
      ->check(CLI::IsMember({"dcsr", "csr", "bcsr", "ri"}));
  fp_cmd->add_option("--group-size", fp.group_size)
      ->check(CLI::IsMember({2, 4, 8, 16, 32}));
  fp_cmd->add_option("--ri-bits", fp.ri_bits)->check(CLI::Range(2, 8));
  fp_cmd->add_option("--report", fp.report)->check(CLI::IsMember(kReportFormats));

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a kernel and verify it against the dense oracle");
  bench_cmd->add_option("--weights", bench.weights)->required();
  auto* act_opt = bench_cmd->add_option("--activations", bench.activations,
                                        "Dense binary activations, pixels x cols");
  auto* pix_opt = bench_cmd->add_option("--pixels", bench.pixels)->check(CLI::PositiveNumber);
  act_opt->excludes(pix_opt);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--kernel", bench.kernel)
      ->check(CLI::IsMember({"dense", "dcsr-vb", "dcsr-ib", "dcsr-spmv", "ri"}));
  bench_cmd->add_option("--group-size", bench.group_size)
      ->check(CLI::IsMember({2, 4, 8, 16, 32}));
  bench_cmd->add_option("--ri-bits", bench.ri_bits)->check(CLI::Range(2, 8));
  bench_cmd->add_option("--repeat", bench.repeat)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", bench.report)->check(CLI::IsMember(kReportFormats));
  bench_cmd->add_option("--x-zero-point", bench.x_zero_point);
  bench_cmd->add_option("--bias-seed", bench.bias_seed);
  bench_cmd->add_option("--requant-multiplier", bench.multiplier);
  bench_cmd->add_option("--requant-shift", bench.shift);
  bench_cmd->add_option("--output-zero-point", bench.output_zero_point);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*enc_cmd) return run_encode(enc);
    if (*ver_cmd) return run_verify(ver);
    if (*fp_cmd) return run_footprint(fp);
    if (*bench_cmd) {
      if (bench.activations.empty() && bench.pixels == 0) {
        std::cerr << "error: bench needs --activations or --pixels\n";
        return kExitUsage;
      }
      return run_bench(bench);
    }
  } catch (const OracleMismatch& e) {
    std::cerr << "oracle mismatch: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
