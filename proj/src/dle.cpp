// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/dle.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "dcsr/error.hpp"

namespace dcsr {

void DleParams::validate() const {
  if (!is_valid_group_size(group_size)) {
    throw InvalidArgument("group size must be one of 2, 4, 8, 16, 32");
  }
  if (dense_row_length == 0) {
    throw InvalidArgument("dense row length must be at least 1");
  }
}

std::string ConstraintReport::describe() const {
  if (ok()) return "ok";
  std::string out;
  auto add = [&](bool flag, const char* name) {
    if (!flag) return;
    if (!out.empty()) out += ", ";
    out += name;
  };
  add(delta_overflow, "lane delta overflow");
  add(offset_overflow, "lane offset overflow");
  add(intercept_overflow, "intercept delta overflow");
  add(slope_overflow, "slope overflow");
  return out;
}

std::uint16_t compute_slope(std::size_t dense_row_length,
                            std::size_t nonzeros) {
  if (nonzeros == 0) return 0;
  const std::size_t m = (2 * dense_row_length + nonzeros) / (2 * nonzeros);
  if (m > std::numeric_limits<std::uint16_t>::max()) {
    throw InvalidArgument("slope does not fit 16 bits");
  }
  return static_cast<std::uint16_t>(m);
}

Decomposition decompose_row(std::span<const std::uint32_t> columns,
                            const DleParams& params) {
  params.validate();
  const std::size_t g = params.group_size;
  const std::size_t ks = columns.size();
  for (std::size_t p = 0; p < ks; ++p) {
    if (columns[p] >= params.dense_row_length ||
        (p > 0 && columns[p] <= columns[p - 1])) {
      throw InvalidArgument("row columns must be strictly ascending and < k_d");
    }
  }

  Decomposition out;
  if (ks == 0) {
    out.encoding = RowEncoding{};
    return out;
  }

  const std::int64_t m64 =
      static_cast<std::int64_t>((2 * params.dense_row_length + ks) / (2 * ks));
  out.report.slope_overflow = m64 > std::numeric_limits<std::uint16_t>::max();

  RowEncoding enc;
  enc.slope = static_cast<std::uint16_t>(
      std::min<std::int64_t>(m64, std::numeric_limits<std::uint16_t>::max()));
  enc.padded_columns.assign(columns.begin(), columns.end());

  const std::size_t n_groups = (ks + g - 1) / g;
  enc.groups.reserve(n_groups);
  std::int64_t prev_intercept = 0;
  for (std::size_t j = 0; j < n_groups; ++j) {
    const std::size_t begin = j * g;
    const std::size_t end = std::min(ks, begin + g);

    std::int64_t intercept = std::numeric_limits<std::int64_t>::max();
    for (std::size_t p = begin; p < end; ++p) {
      const auto lane = static_cast<std::int64_t>(p - begin);
      intercept = std::min(intercept,
                           static_cast<std::int64_t>(columns[p]) - lane * m64);
    }

    GroupDeltas group;
    group.lane_deltas.reserve(end - begin);
    for (std::size_t p = begin; p < end; ++p) {
      const auto lane = static_cast<std::int64_t>(p - begin);
      const std::int64_t delta =
          static_cast<std::int64_t>(columns[p]) - lane * m64 - intercept;
      if (delta > params.delta_max) out.report.delta_overflow = true;
      if (lane * m64 + delta > params.offset_max) {
        out.report.offset_overflow = true;
      }
      group.lane_deltas.push_back(static_cast<std::uint8_t>(
          std::clamp<std::int64_t>(delta, 0, 255)));
    }

    const std::int64_t intercept_delta =
        j == 0 ? intercept
               : intercept - (prev_intercept + m64 * static_cast<std::int64_t>(g));
    if (intercept_delta < params.intercept_delta_min ||
        intercept_delta > params.intercept_delta_max) {
      out.report.intercept_overflow = true;
    }
    group.intercept_delta = static_cast<std::int8_t>(
        std::clamp<std::int64_t>(intercept_delta, -128, 127));
    prev_intercept = intercept;
    enc.groups.push_back(std::move(group));
  }

  if (out.report.ok()) out.encoding = std::move(enc);
  return out;
}

RowEncoding insert_padding(std::span<const std::uint32_t> columns,
                           const DleParams& params) {
  params.validate();
  std::vector<std::uint32_t> cols(columns.begin(), columns.end());
  std::vector<bool> is_padding(cols.size(), false);
  const auto kd = static_cast<std::int64_t>(params.dense_row_length);

  for (;;) {
    Decomposition d = decompose_row(cols, params);
    if (d.report.ok()) {
      RowEncoding enc = std::move(*d.encoding);
      for (std::size_t p = 0; p < is_padding.size(); ++p) {
        if (is_padding[p]) {
          enc.padding_positions.push_back(static_cast<std::uint32_t>(p));
        }
      }
      return enc;
    }

    // Largest gap between consecutive stored columns, with virtual
    // boundaries at -1 and k_d. `slot` is the insertion index in cols.
    std::int64_t best_width = 0;
    std::int64_t best_left = 0;
    std::size_t slot = 0;
    std::int64_t left = -1;
    for (std::size_t p = 0; p <= cols.size(); ++p) {
      const std::int64_t right =
          p < cols.size() ? static_cast<std::int64_t>(cols[p]) : kd;
      if (right - left > best_width) {
        best_width = right - left;
        best_left = left;
        slot = p;
      }
      left = right;
    }
    // A fully dense row always satisfies the constraints.
    assert(best_width >= 2);
    if (best_width < 2) {
      throw ConstraintError("padding failed: row is full but " +
                            d.report.describe());
    }
    const auto inserted =
        static_cast<std::uint32_t>((best_left + best_left + best_width) / 2);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(slot), inserted);
    is_padding.insert(is_padding.begin() + static_cast<std::ptrdiff_t>(slot),
                      true);
  }
}

std::vector<std::uint32_t> reconstruct_columns(const RowEncoding& enc,
                                               const DleParams& params) {
  const auto g = static_cast<std::int64_t>(params.group_size);
  const std::int64_t m = enc.slope;
  std::vector<std::uint32_t> out;
  std::int64_t intercept = 0;
  for (std::size_t j = 0; j < enc.groups.size(); ++j) {
    const GroupDeltas& group = enc.groups[j];
    intercept = j == 0 ? group.intercept_delta
                       : intercept + m * g + group.intercept_delta;
    for (std::size_t i = 0; i < group.lane_deltas.size(); ++i) {
      const std::int64_t c =
          static_cast<std::int64_t>(i) * m + group.lane_deltas[i] + intercept;
      out.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return out;
}

}  // namespace dcsr
