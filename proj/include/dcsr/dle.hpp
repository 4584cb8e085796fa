// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Delta-linear encoding of one sparse row.
//
// Element p of a row (global position p, group j = p / g, lane i = p % g) is
// predicted by the line i * m, where the slope m is the rounded mean column
// gap of the row. The deviation c_p - i * m is split into a per-group
// intercept n_j (the group minimum) and a non-negative per-lane delta. The
// intercepts are stored incrementally against the expected group stride:
//
//   dn_0 = n_0,   dn_j = n_j - (n_{j-1} + m * g)
//
// so that c = i * m + delta + n_j, where i * m + delta is the unsigned
// gather/scatter offset and n_j the base pointer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dcsr {

inline constexpr bool is_valid_group_size(std::size_t g) {
  return g == 2 || g == 4 || g == 8 || g == 16 || g == 32;
}

struct DleParams {
  std::size_t group_size = 16;
  std::size_t dense_row_length = 0;
  std::int32_t offset_max = 255;
  std::int32_t delta_max = 127;
  std::int32_t intercept_delta_min = -128;
  std::int32_t intercept_delta_max = 127;

  // Throws InvalidArgument on an unsupported group size or k_d == 0.
  void validate() const;
};

struct GroupDeltas {
  std::vector<std::uint8_t> lane_deltas;
  std::int8_t intercept_delta = 0;
};

struct RowEncoding {
  std::uint16_t slope = 0;
  std::vector<std::uint32_t> padded_columns;
  // Indices into padded_columns of the inserted zero elements, ascending.
  std::vector<std::uint32_t> padding_positions;
  std::vector<GroupDeltas> groups;
};

// Which constraint families a decomposition breaks.
struct ConstraintReport {
  bool delta_overflow = false;      // some lane delta > delta_max
  bool offset_overflow = false;     // some i * m + delta > offset_max
  bool intercept_overflow = false;  // some dn_j outside the signed range
  bool slope_overflow = false;      // m does not fit 16 bits

  bool ok() const {
    return !delta_overflow && !offset_overflow && !intercept_overflow &&
           !slope_overflow;
  }
  std::string describe() const;
};

struct Decomposition {
  ConstraintReport report;
  // Present iff report.ok().
  std::optional<RowEncoding> encoding;
};

// round-half-up(k_d / k_s); 0 for an empty row.
std::uint16_t compute_slope(std::size_t dense_row_length,
                            std::size_t nonzeros);

// Decomposes `columns` as-is. padding_positions of the result are empty.
Decomposition decompose_row(std::span<const std::uint32_t> columns,
                            const DleParams& params);

// Greedily inserts zero elements into the middle of the largest gap until the
// decomposition satisfies every constraint. Gaps include the virtual row
// boundaries -1 and k_d; ties go to the leftmost gap.
RowEncoding insert_padding(std::span<const std::uint32_t> columns,
                           const DleParams& params);

// Scalar reference reconstruction of enc.padded_columns from slope, lane
// deltas and chained intercepts.
std::vector<std::uint32_t> reconstruct_columns(const RowEncoding& enc,
                                               const DleParams& params);

}  // namespace dcsr
