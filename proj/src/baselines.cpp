// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/baselines.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "byte_io.hpp"
#include "dcsr/error.hpp"

namespace dcsr {
namespace {

constexpr std::size_t kU16Limit = std::numeric_limits<std::uint16_t>::max();
constexpr std::size_t kAlignment = 4;

void require_u16(std::size_t value, const char* what) {
  if (value > kU16Limit) {
    throw FormatLimitError(std::string(what) + " (" + std::to_string(value) +
                           ") exceeds the 16-bit index range");
  }
}

void check_row_ptr(std::span<const std::uint16_t> row_ptr, std::size_t rows,
                   std::size_t elements) {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != elements) {
    throw FormatError("row_ptr does not match element count");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_ptr[r + 1] < row_ptr[r]) throw FormatError("row_ptr decreasing");
  }
}

void read_u16s(detail::ByteReader& r, std::vector<std::uint16_t>& out,
               std::size_t n) {
  auto s = r.take(n * 2, "u16 array");
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<std::uint16_t>(s[2 * i] | (s[2 * i + 1] << 8));
  }
}

void read_i8s(detail::ByteReader& r, std::vector<std::int8_t>& out,
              std::size_t n) {
  auto s = r.take(n, "i8 array");
  out.assign(s.begin(), s.end());
}

}  // namespace

// ---------------------------------------------------------------- CSR-16

CsrMatrix16 encode_csr(const DenseMatrixI8& m) {
  require_valid_dims(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  require_u16(static_cast<std::size_t>(m.cols()) - 1, "largest column index");
  require_u16(count_nonzeros(m), "non-zero count");
  CsrMatrix16 csr;
  csr.rows = static_cast<std::uint32_t>(m.rows());
  csr.cols = static_cast<std::uint32_t>(m.cols());
  csr.row_ptr.push_back(0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) == 0) continue;
      csr.values.push_back(m(r, c));
      csr.col_idx.push_back(static_cast<std::uint16_t>(c));
    }
    csr.row_ptr.push_back(static_cast<std::uint16_t>(csr.values.size()));
  }
  return csr;
}

DenseMatrixI8 decode_csr(const CsrMatrix16& csr) {
  require_valid_dims(csr.rows, csr.cols);
  check_row_ptr(csr.row_ptr, csr.rows, csr.values.size());
  if (csr.col_idx.size() != csr.values.size()) {
    throw FormatError("col_idx and values differ in length");
  }
  DenseMatrixI8 m = DenseMatrixI8::Zero(csr.rows, csr.cols);
  for (std::size_t r = 0; r < csr.rows; ++r) {
    for (std::size_t k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k) {
      if (csr.col_idx[k] >= csr.cols) throw FormatError("column out of range");
      if (k > csr.row_ptr[r] && csr.col_idx[k] <= csr.col_idx[k - 1]) {
        throw FormatError("CSR columns not strictly ascending");
      }
      m(static_cast<Eigen::Index>(r), csr.col_idx[k]) = csr.values[k];
    }
  }
  return m;
}

FootprintBreakdown footprint(const CsrMatrix16& csr) {
  FootprintBreakdown f;
  f.format = "csr";
  f.dense_bytes = std::size_t{csr.rows} * csr.cols;
  f.values_bytes = csr.values.size();
  f.metadata_parts = {{"col_idx", csr.col_idx.size() * 2},
                      {"row_ptr", csr.row_ptr.size() * 2}};
  finalize_footprint(f);
  return f;
}

std::vector<std::uint8_t> serialize(const CsrMatrix16& csr) {
  detail::ByteWriter w;
  w.magic("CSRX");
  w.u32(csr.rows);
  w.u32(csr.cols);
  w.u32(static_cast<std::uint32_t>(csr.values.size()));
  for (auto v : csr.row_ptr) w.u16(v);
  w.align(kAlignment);
  for (auto v : csr.col_idx) w.u16(v);
  w.align(kAlignment);
  w.bytes(csr.values);
  w.align(kAlignment);
  return w.take();
}

CsrMatrix16 deserialize_csr(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("CSRX");
  CsrMatrix16 csr;
  csr.rows = r.u32();
  csr.cols = r.u32();
  const std::uint32_t nnz = r.u32();
  if (csr.rows == 0 || csr.cols == 0) throw FormatError("zero matrix dimension");
  read_u16s(r, csr.row_ptr, std::size_t{csr.rows} + 1);
  r.align(kAlignment);
  read_u16s(r, csr.col_idx, nnz);
  r.align(kAlignment);
  read_i8s(r, csr.values, nnz);
  r.align(kAlignment);
  r.expect_end();
  check_row_ptr(csr.row_ptr, csr.rows, nnz);
  return csr;
}

// ---------------------------------------------------------------- BCSR(2,2)

BcsrMatrix encode_bcsr(const DenseMatrixI8& m) {
  require_valid_dims(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  BcsrMatrix b;
  b.rows = static_cast<std::uint32_t>(m.rows());
  b.cols = static_cast<std::uint32_t>(m.cols());
  require_u16(b.block_cols() - 1, "largest block column index");
  auto at = [&](std::size_t r, std::size_t c) -> std::int8_t {
    return r < b.rows && c < b.cols
               ? m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))
               : std::int8_t{0};
  };
  b.block_row_ptr.push_back(0);
  for (std::size_t br = 0; br < b.block_rows(); ++br) {
    for (std::size_t bc = 0; bc < b.block_cols(); ++bc) {
      std::int8_t block[4];
      bool any = false;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          block[i * 2 + j] = at(2 * br + i, 2 * bc + j);
          any = any || block[i * 2 + j] != 0;
        }
      }
      if (!any) continue;
      b.block_values.insert(b.block_values.end(), block, block + 4);
      b.block_col_idx.push_back(static_cast<std::uint16_t>(bc));
    }
    require_u16(b.blocks(), "stored block count");
    b.block_row_ptr.push_back(static_cast<std::uint16_t>(b.blocks()));
  }
  return b;
}

DenseMatrixI8 decode_bcsr(const BcsrMatrix& b) {
  require_valid_dims(b.rows, b.cols);
  check_row_ptr(b.block_row_ptr, b.block_rows(), b.blocks());
  if (b.block_values.size() != 4 * b.blocks()) {
    throw FormatError("block values length mismatch");
  }
  DenseMatrixI8 m = DenseMatrixI8::Zero(b.rows, b.cols);
  for (std::size_t br = 0; br < b.block_rows(); ++br) {
    for (std::size_t k = b.block_row_ptr[br]; k < b.block_row_ptr[br + 1]; ++k) {
      const std::size_t bc = b.block_col_idx[k];
      if (bc >= b.block_cols()) throw FormatError("block column out of range");
      if (k > b.block_row_ptr[br] && bc <= b.block_col_idx[k - 1]) {
        throw FormatError("BCSR block columns not strictly ascending");
      }
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          const std::size_t r = 2 * br + i, c = 2 * bc + j;
          const std::int8_t v = b.block_values[4 * k + 2 * i + j];
          if (r < b.rows && c < b.cols) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
          } else if (v != 0) {
            throw FormatError("non-zero in virtual block padding");
          }
        }
      }
    }
  }
  return m;
}

FootprintBreakdown footprint(const BcsrMatrix& b) {
  FootprintBreakdown f;
  f.format = "bcsr";
  f.dense_bytes = std::size_t{b.rows} * b.cols;
  const auto nnz = static_cast<std::size_t>(std::count_if(
      b.block_values.begin(), b.block_values.end(),
      [](std::int8_t v) { return v != 0; }));
  f.values_bytes = nnz;
  f.padding_bytes = b.block_values.size() - nnz;  // zero fill inside blocks
  f.metadata_parts = {{"block_col_idx", b.block_col_idx.size() * 2},
                      {"block_row_ptr", b.block_row_ptr.size() * 2}};
  finalize_footprint(f);
  return f;
}

std::vector<std::uint8_t> serialize(const BcsrMatrix& b) {
  detail::ByteWriter w;
  w.magic("BCSR");
  w.u32(b.rows);
  w.u32(b.cols);
  w.u32(static_cast<std::uint32_t>(b.blocks()));
  for (auto v : b.block_row_ptr) w.u16(v);
  w.align(kAlignment);
  for (auto v : b.block_col_idx) w.u16(v);
  w.align(kAlignment);
  w.bytes(b.block_values);
  w.align(kAlignment);
  return w.take();
}

BcsrMatrix deserialize_bcsr(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("BCSR");
  BcsrMatrix b;
  b.rows = r.u32();
  b.cols = r.u32();
  const std::uint32_t blocks = r.u32();
  if (b.rows == 0 || b.cols == 0) throw FormatError("zero matrix dimension");
  read_u16s(r, b.block_row_ptr, b.block_rows() + 1);
  r.align(kAlignment);
  read_u16s(r, b.block_col_idx, blocks);
  r.align(kAlignment);
  read_i8s(r, b.block_values, std::size_t{blocks} * 4);
  r.align(kAlignment);
  r.expect_end();
  check_row_ptr(b.block_row_ptr, b.block_rows(), blocks);
  return b;
}

// ---------------------------------------------------------------- RI

void pack_bits(std::span<const std::uint32_t> in, unsigned bits,
               std::vector<std::uint8_t>& out) {
  out.assign(packed_bytes(in.size(), bits), 0);
  std::size_t bit = 0;
  for (std::uint32_t v : in) {
    for (unsigned k = 0; k < bits; ++k, ++bit) {
      if ((v >> k) & 1u) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
}

std::uint32_t unpack_bits(std::span<const std::uint8_t> packed, unsigned bits,
                          std::size_t index) {
  std::uint32_t v = 0;
  std::size_t bit = index * bits;
  for (unsigned k = 0; k < bits; ++k, ++bit) {
    if ((packed[bit / 8] >> (bit % 8)) & 1u) v |= 1u << k;
  }
  return v;
}

RiMatrix encode_ri(const DenseMatrixI8& m, unsigned bits) {
  require_valid_dims(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  if (bits < 2 || bits > 8) throw InvalidArgument("RI delta bits must be in [2, 8]");
  RiMatrix ri;
  ri.rows = static_cast<std::uint32_t>(m.rows());
  ri.cols = static_cast<std::uint32_t>(m.cols());
  ri.delta_bits = bits;
  const std::uint32_t max_delta = (1u << bits) - 1;

  std::vector<std::uint32_t> deltas;
  ri.row_ptr.push_back(0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::uint32_t prev = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) == 0) continue;
      auto gap = static_cast<std::uint32_t>(c) - prev;
      while (gap > max_delta) {
        deltas.push_back(max_delta);
        ri.values.push_back(0);
        gap -= max_delta;
      }
      deltas.push_back(gap);
      ri.values.push_back(m(r, c));
      prev = static_cast<std::uint32_t>(c);
    }
    require_u16(ri.values.size(), "RI element count");
    ri.row_ptr.push_back(static_cast<std::uint16_t>(ri.values.size()));
  }
  pack_bits(deltas, bits, ri.deltas);
  return ri;
}

std::vector<std::uint32_t> ri_row_columns(const RiMatrix& ri, std::size_t r) {
  std::vector<std::uint32_t> cols;
  std::uint32_t c = 0;
  for (std::size_t k = ri.row_ptr[r]; k < ri.row_ptr[r + 1]; ++k) {
    c += unpack_bits(ri.deltas, ri.delta_bits, k);
    cols.push_back(c);
  }
  return cols;
}

DenseMatrixI8 decode_ri(const RiMatrix& ri) {
  require_valid_dims(ri.rows, ri.cols);
  if (ri.delta_bits < 2 || ri.delta_bits > 8) throw FormatError("bad RI delta width");
  check_row_ptr(ri.row_ptr, ri.rows, ri.values.size());
  if (ri.deltas.size() != packed_bytes(ri.values.size(), ri.delta_bits)) {
    throw FormatError("packed delta stream length mismatch");
  }
  DenseMatrixI8 m = DenseMatrixI8::Zero(ri.rows, ri.cols);
  for (std::size_t r = 0; r < ri.rows; ++r) {
    const auto cols = ri_row_columns(ri, r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] >= ri.cols || (k > 0 && cols[k] <= cols[k - 1])) {
        throw FormatError("RI column out of order or range");
      }
      m(static_cast<Eigen::Index>(r), cols[k]) = ri.values[ri.row_ptr[r] + k];
    }
  }
  return m;
}

FootprintBreakdown footprint(const RiMatrix& ri) {
  FootprintBreakdown f;
  f.format = "ri";
  f.dense_bytes = std::size_t{ri.rows} * ri.cols;
  f.padding_bytes = static_cast<std::size_t>(
      std::count(ri.values.begin(), ri.values.end(), std::int8_t{0}));
  f.values_bytes = ri.values.size() - f.padding_bytes;
  f.metadata_parts = {{"deltas", packed_bytes(ri.values.size(), ri.delta_bits)},
                      {"row_ptr", ri.row_ptr.size() * 2}};
  finalize_footprint(f);
  return f;
}

std::vector<std::uint8_t> serialize(const RiMatrix& ri) {
  detail::ByteWriter w;
  w.magic("RIDX");
  w.u32(ri.rows);
  w.u32(ri.cols);
  w.u32(static_cast<std::uint32_t>(ri.values.size()));
  w.u8(static_cast<std::uint8_t>(ri.delta_bits));
  w.align(kAlignment);
  for (auto v : ri.row_ptr) w.u16(v);
  w.align(kAlignment);
  w.bytes(ri.deltas);
  w.align(kAlignment);
  w.bytes(ri.values);
  w.align(kAlignment);
  return w.take();
}

RiMatrix deserialize_ri(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("RIDX");
  RiMatrix ri;
  ri.rows = r.u32();
  ri.cols = r.u32();
  const std::uint32_t elements = r.u32();
  ri.delta_bits = r.u8();
  if (ri.rows == 0 || ri.cols == 0) throw FormatError("zero matrix dimension");
  if (ri.delta_bits < 2 || ri.delta_bits > 8) throw FormatError("bad RI delta width");
  r.align(kAlignment);
  read_u16s(r, ri.row_ptr, std::size_t{ri.rows} + 1);
  r.align(kAlignment);
  {
    auto s = r.take(packed_bytes(elements, ri.delta_bits), "deltas");
    ri.deltas.assign(s.begin(), s.end());
  }
  r.align(kAlignment);
  read_i8s(r, ri.values, elements);
  r.align(kAlignment);
  r.expect_end();
  check_row_ptr(ri.row_ptr, ri.rows, elements);
  return ri;
}

}  // namespace dcsr
