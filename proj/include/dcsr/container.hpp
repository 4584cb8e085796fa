// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dcsr/engine.hpp"
#include "dcsr/footprint.hpp"
#include "dcsr/matrix.hpp"

namespace dcsr {

// Whole-matrix dCSR object. Streams are stored per section:
//
//   row_ptr          element start of each row in `values`, rows + 1 entries
//   slopes           per-row slope m
//   mask_ptr         first extension mask of each row, rows + 1 entries
//   intercept_deltas one dn_j per group, all rows concatenated
//   tracking         one tracking bitmap per group (bits 0..2)
//   base_nibbles     per row, ceil(groups / 2) * g interleaved nibble bytes
//   masks            extension masks, lane i <-> bit i
//   values           weights in column order, 0 at padding positions
struct DcsrMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t group_size = 16;
  std::vector<std::uint32_t> row_ptr;
  std::vector<std::uint16_t> slopes;
  std::vector<std::uint32_t> mask_ptr;
  std::vector<std::int8_t> intercept_deltas;
  std::vector<std::uint8_t> tracking;
  std::vector<std::uint8_t> base_nibbles;
  std::vector<LaneMask> masks;
  std::vector<std::int8_t> values;

  bool operator==(const DcsrMatrix&) const = default;

  std::size_t row_elements(std::size_t r) const {
    return row_ptr[r + 1] - row_ptr[r];
  }
  std::size_t row_groups(std::size_t r) const {
    return (row_elements(r) + group_size - 1) / group_size;
  }
  // Serialized size of one extension mask.
  std::size_t mask_bytes() const { return group_size >= 8 ? group_size / 8 : 1; }
};

// Checks every structural invariant of the streams. Throws ConstraintError.
void validate(const DcsrMatrix& d);

DcsrMatrix encode_matrix(const DenseMatrixI8& m, std::size_t group_size = 16);

DenseMatrixI8 decode_matrix(const DcsrMatrix& d);
DenseMatrixI8 decode_matrix(const DcsrMatrix& d, VectorEngine& engine);

// One decoded group: column = base + offsets[l] for active lanes l, weights
// at values[element_begin + l].
struct DecodedGroup {
  std::int64_t base = 0;
  LaneVector offsets;
  Predicate active;
  std::size_t element_begin = 0;
  std::size_t size = 0;
};

// Per-row start of the group streams (intercept_deltas / tracking) and of
// the base_nibbles stream.
struct RowIndex {
  std::vector<std::size_t> group_begin;
  std::vector<std::size_t> nibble_begin;
};
RowIndex build_row_index(const DcsrMatrix& d);

// Walks the groups of one row through the vector engine: deinterleave the
// nibble pair, recompose the extension bits, add lane * m, chain the base
// pointer. Assumes validate(d) passed.
class RowGroupDecoder {
 public:
  RowGroupDecoder(const DcsrMatrix& d, const RowIndex& index, std::size_t row,
                  VectorEngine& engine);

  // False once the row is exhausted (after checking the mask stream).
  bool next(DecodedGroup& out);
  std::size_t groups() const { return groups_; }

 private:
  const DcsrMatrix& d_;
  VectorEngine& engine_;
  std::size_t row_;
  std::size_t groups_;
  std::size_t next_group_ = 0;
  std::size_t group_begin_;   // index into intercept_deltas / tracking
  std::size_t nibble_begin_;  // index into base_nibbles
  std::size_t mask_cursor_;
  std::int64_t base_ = 0;
  LaneVector pair_;
};

std::vector<std::uint8_t> serialize(const DcsrMatrix& d);
DcsrMatrix deserialize(std::span<const std::uint8_t> bytes);

FootprintBreakdown footprint(const DcsrMatrix& d);

// Column list of row r reconstructed through the scalar reference path
// (no engine); used by tests.
std::vector<std::uint32_t> row_columns(const DcsrMatrix& d, std::size_t r);

}  // namespace dcsr
