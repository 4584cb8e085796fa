// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Reference sparse formats used for footprint comparison: CSR with 16-bit
// indices, BCSR with fixed (2,2) blocks, and relative indexing with b-bit
// column distances and zero padding for gaps that do not fit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dcsr/footprint.hpp"
#include "dcsr/matrix.hpp"

namespace dcsr {

struct CsrMatrix16 {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::int8_t> values;
  std::vector<std::uint16_t> col_idx;
  std::vector<std::uint16_t> row_ptr;

  bool operator==(const CsrMatrix16&) const = default;
};

// Throws FormatLimitError if nnz or cols exceed the 16-bit index range.
CsrMatrix16 encode_csr(const DenseMatrixI8& m);
DenseMatrixI8 decode_csr(const CsrMatrix16& csr);
FootprintBreakdown footprint(const CsrMatrix16& csr);
std::vector<std::uint8_t> serialize(const CsrMatrix16& csr);
CsrMatrix16 deserialize_csr(std::span<const std::uint8_t> bytes);

inline constexpr std::size_t kBcsrBlock = 2;

struct BcsrMatrix {
  std::uint32_t rows = 0;  // original dimensions
  std::uint32_t cols = 0;
  std::vector<std::int8_t> block_values;  // 4 per block, row-major in block
  std::vector<std::uint16_t> block_col_idx;
  std::vector<std::uint16_t> block_row_ptr;

  std::size_t block_rows() const { return (rows + 1) / 2; }
  std::size_t block_cols() const { return (cols + 1) / 2; }
  std::size_t blocks() const { return block_col_idx.size(); }

  bool operator==(const BcsrMatrix&) const = default;
};

// Odd dimensions are padded virtually with a zero row / column.
BcsrMatrix encode_bcsr(const DenseMatrixI8& m);
DenseMatrixI8 decode_bcsr(const BcsrMatrix& bcsr);
FootprintBreakdown footprint(const BcsrMatrix& bcsr);
std::vector<std::uint8_t> serialize(const BcsrMatrix& bcsr);
BcsrMatrix deserialize_bcsr(std::span<const std::uint8_t> bytes);

struct RiMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t delta_bits = 4;
  std::vector<std::uint8_t> deltas;  // bit-packed, LSB first
  std::vector<std::int8_t> values;   // 0 at padding elements
  std::vector<std::uint16_t> row_ptr;

  std::size_t elements() const { return values.size(); }
  bool operator==(const RiMatrix&) const = default;
};

// Width of the packed delta stream for `elements` entries of `bits` each.
inline std::size_t packed_bytes(std::size_t elements, std::size_t bits) {
  return (elements * bits + 7) / 8;
}
void pack_bits(std::span<const std::uint32_t> in, unsigned bits,
               std::vector<std::uint8_t>& out);
std::uint32_t unpack_bits(std::span<const std::uint8_t> packed, unsigned bits,
                          std::size_t index);

// First delta of a row is the absolute first column; every later delta is
// the distance to the previous stored element. Gaps above 2^b - 1 get
// padding elements (delta 2^b - 1, value 0). bits in [2, 8].
RiMatrix encode_ri(const DenseMatrixI8& m, unsigned bits = 4);
DenseMatrixI8 decode_ri(const RiMatrix& ri);
// Absolute columns of row r (including padding elements).
std::vector<std::uint32_t> ri_row_columns(const RiMatrix& ri, std::size_t r);
FootprintBreakdown footprint(const RiMatrix& ri);
std::vector<std::uint8_t> serialize(const RiMatrix& ri);
RiMatrix deserialize_ri(std::span<const std::uint8_t> bytes);

}  // namespace dcsr
