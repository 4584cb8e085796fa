// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

#include "byte_io.hpp"
#include "dcsr/error.hpp"

namespace dcsr {
namespace {

constexpr const char* kMmHeader =
    "%%MatrixMarket matrix coordinate integer general";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char ch) { return std::isspace(ch); });
}

}  // namespace

DenseMatrixI8 read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty Matrix Market file");
  {
    std::istringstream header(lower(line));
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%matrixmarket" || object != "matrix" ||
        format != "coordinate" || field != "integer" ||
        symmetry != "general") {
      throw FormatError("unsupported Matrix Market header: " + line);
    }
  }

  // Size line, after comments.
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    if (!blank(line)) break;
  }
  long long rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> entries)) {
      throw FormatError("malformed Matrix Market size line: " + line);
    }
    std::string extra;
    if (size >> extra) throw FormatError("malformed size line: " + line);
  }
  if (rows <= 0 || cols <= 0 || rows > (1LL << 31) / cols || entries < 0 ||
      entries > rows * cols) {
    throw FormatError("invalid Matrix Market dimensions");
  }

  DenseMatrixI8 m = DenseMatrixI8::Zero(rows, cols);
  std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
  long long read = 0;
  while (read < entries && std::getline(in, line)) {
    if (blank(line) || line[0] == '%') continue;
    std::istringstream entry(line);
    long long r = 0, c = 0, v = 0;
    if (!(entry >> r >> c >> v)) {
      throw FormatError("malformed Matrix Market entry: " + line);
    }
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw FormatError("Matrix Market index out of range: " + line);
    }
    if (v < std::numeric_limits<std::int8_t>::min() ||
        v > std::numeric_limits<std::int8_t>::max()) {
      throw FormatError("value outside [-128, 127]: " + line);
    }
    const auto flat = static_cast<std::size_t>((r - 1) * cols + (c - 1));
    if (seen[flat]) throw FormatError("duplicate Matrix Market entry: " + line);
    seen[flat] = true;
    m(r - 1, c - 1) = static_cast<std::int8_t>(v);
    ++read;
  }
  if (read != entries) throw FormatError("Matrix Market file has too few entries");
  while (std::getline(in, line)) {
    if (!blank(line) && line[0] != '%') {
      throw FormatError("Matrix Market file has extra entries");
    }
  }
  return m;
}

void write_matrix_market(const DenseMatrixI8& m, std::ostream& out) {
  out << kMmHeader << '\n';
  out << m.rows() << ' ' << m.cols() << ' ' << (m.array() != 0).count() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0) {
        out << (r + 1) << ' ' << (c + 1) << ' ' << static_cast<int>(m(r, c))
            << '\n';
      }
    }
  }
}

DenseMatrixI8 load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_matrix_market(in);
}

void store_matrix_market(const DenseMatrixI8& m,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_matrix_market(m, out);
  if (!out) throw FormatError("write failed for " + path.string());
}

std::vector<std::uint8_t> encode_dense_binary(const DenseMatrixI8& m) {
  require_valid_dims(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  detail::ByteWriter w;
  w.magic("DMI8");
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  w.bytes(std::span<const std::int8_t>(m.data(), static_cast<std::size_t>(m.size())));
  return w.take();
}

DenseMatrixI8 decode_dense_binary(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("DMI8");
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  if (rows == 0 || cols == 0) throw FormatError("dense binary with zero dimension");
  const auto payload = r.take(static_cast<std::size_t>(rows) * cols, "payload");
  r.expect_end();
  DenseMatrixI8 m(rows, cols);
  std::memcpy(m.data(), payload.data(), payload.size());
  return m;
}

DenseMatrixI8 load_dense_binary(const std::filesystem::path& path) {
  return decode_dense_binary(read_file_bytes(path));
}

void store_dense_binary(const DenseMatrixI8& m,
                        const std::filesystem::path& path) {
  write_file_bytes(path, encode_dense_binary(m));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace dcsr
