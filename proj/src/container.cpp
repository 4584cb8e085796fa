// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/container.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "byte_io.hpp"
#include "dcsr/dbe.hpp"
#include "dcsr/dle.hpp"
#include "dcsr/error.hpp"

namespace dcsr {
namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kAlignment = 4;

std::size_t nibble_bytes(std::size_t groups, std::size_t g) {
  return (groups + 1) / 2 * g;
}

LaneMask lane_bits(std::size_t g) {
  return g >= 32 ? ~LaneMask{0} : ((LaneMask{1} << g) - 1);
}

}  // namespace

void finalize_footprint(FootprintBreakdown& f) {
  f.metadata_bytes = 0;
  for (const auto& [name, bytes] : f.metadata_parts) f.metadata_bytes += bytes;
  f.total_bytes = f.values_bytes + f.padding_bytes + f.metadata_bytes;
}

void validate(const DcsrMatrix& d) {
  auto fail = [](const std::string& what) { throw ConstraintError(what); };
  if (!is_valid_group_size(d.group_size)) fail("invalid group size");
  if (d.rows == 0 || d.cols == 0) fail("zero matrix dimension");
  if (d.row_ptr.size() != std::size_t{d.rows} + 1) fail("row_ptr length");
  if (d.mask_ptr.size() != std::size_t{d.rows} + 1) fail("mask_ptr length");
  if (d.slopes.size() != d.rows) fail("slopes length");
  if (d.row_ptr[0] != 0 || d.mask_ptr[0] != 0) fail("row tables must start at 0");

  std::size_t groups = 0;
  std::size_t nibbles = 0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    if (d.row_ptr[r + 1] < d.row_ptr[r]) fail("row_ptr decreasing");
    if (d.mask_ptr[r + 1] < d.mask_ptr[r]) fail("mask_ptr decreasing");
    if (d.row_elements(r) > d.cols) fail("row holds more elements than columns");
    const std::size_t row_groups = d.row_groups(r);
    if (groups + row_groups > d.tracking.size()) fail("tracking stream overrun");
    std::size_t row_masks = 0;
    for (std::size_t j = 0; j < row_groups; ++j) {
      const std::uint8_t t = d.tracking[groups + j];
      if (t >> kExtensionBits) fail("tracking bitmap uses reserved bits");
      row_masks += static_cast<std::size_t>(std::popcount(t));
    }
    if (d.mask_ptr[r + 1] - d.mask_ptr[r] != row_masks) {
      fail("mask_ptr disagrees with tracking bitmaps in row " + std::to_string(r));
    }
    groups += row_groups;
    nibbles += nibble_bytes(row_groups, d.group_size);
  }
  if (d.row_ptr[d.rows] != d.values.size()) fail("values length");
  if (groups != d.tracking.size()) fail("tracking length");
  if (groups != d.intercept_deltas.size()) fail("intercept_deltas length");
  if (nibbles != d.base_nibbles.size()) fail("base_nibbles length");
  if (d.mask_ptr[d.rows] != d.masks.size()) fail("masks length");
  const LaneMask valid = lane_bits(d.group_size);
  for (LaneMask m : d.masks) {
    if (m == 0) fail("all-zero extension mask");
    if (m & ~valid) fail("extension mask wider than group");
  }
}

DcsrMatrix encode_matrix(const DenseMatrixI8& m, std::size_t group_size) {
  require_valid_dims(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  DleParams params;
  params.group_size = group_size;
  params.dense_row_length = static_cast<std::size_t>(m.cols());
  params.validate();

  DcsrMatrix d;
  d.rows = static_cast<std::uint32_t>(m.rows());
  d.cols = static_cast<std::uint32_t>(m.cols());
  d.group_size = static_cast<std::uint32_t>(group_size);
  d.row_ptr.push_back(0);
  d.mask_ptr.push_back(0);

  for (const SparseRow& row : to_sparse_rows(m)) {
    const RowEncoding enc = insert_padding(row.columns, params);
    d.slopes.push_back(enc.slope);

    // Original values in column order, zero where padding was inserted.
    std::size_t next_padding = 0, next_value = 0;
    for (std::size_t p = 0; p < enc.padded_columns.size(); ++p) {
      if (next_padding < enc.padding_positions.size() &&
          enc.padding_positions[next_padding] == p) {
        d.values.push_back(0);
        ++next_padding;
      } else {
        d.values.push_back(row.values[next_value++]);
      }
    }

    std::vector<EncodedGroup> groups;
    groups.reserve(enc.groups.size());
    for (const GroupDeltas& gd : enc.groups) {
      groups.push_back(decompose_group(gd.lane_deltas, group_size));
      d.intercept_deltas.push_back(gd.intercept_delta);
      d.tracking.push_back(groups.back().tracking);
      d.masks.insert(d.masks.end(), groups.back().masks.begin(),
                     groups.back().masks.end());
    }
    for (std::size_t j = 0; j < groups.size(); j += 2) {
      const EncodedGroup* lower = j + 1 < groups.size() ? &groups[j + 1] : nullptr;
      const auto bytes = interleave_pair(groups[j], lower, group_size);
      d.base_nibbles.insert(d.base_nibbles.end(), bytes.begin(), bytes.end());
    }
    d.row_ptr.push_back(static_cast<std::uint32_t>(d.values.size()));
    d.mask_ptr.push_back(static_cast<std::uint32_t>(d.masks.size()));
  }
  return d;
}

RowIndex build_row_index(const DcsrMatrix& d) {
  RowIndex index;
  index.group_begin.resize(std::size_t{d.rows} + 1);
  index.nibble_begin.resize(std::size_t{d.rows} + 1);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const std::size_t groups = d.row_groups(r);
    index.group_begin[r + 1] = index.group_begin[r] + groups;
    index.nibble_begin[r + 1] =
        index.nibble_begin[r] + nibble_bytes(groups, d.group_size);
  }
  return index;
}

RowGroupDecoder::RowGroupDecoder(const DcsrMatrix& d, const RowIndex& index,
                                 std::size_t row, VectorEngine& engine)
    : d_(d),
      engine_(engine),
      row_(row),
      groups_(d.row_groups(row)),
      group_begin_(index.group_begin[row]),
      nibble_begin_(index.nibble_begin[row]),
      mask_cursor_(d.mask_ptr[row]) {
  if (engine.lanes() != d.group_size) {
    throw InvalidArgument("engine lane count differs from group size");
  }
}

bool RowGroupDecoder::next(DecodedGroup& out) {
  const std::size_t g = d_.group_size;
  if (next_group_ == groups_) {
    if (mask_cursor_ != d_.mask_ptr[row_ + 1]) {
      throw ConstraintError("row consumed a different number of masks");
    }
    return false;
  }
  const std::size_t j = next_group_++;

  if (j % 2 == 0) {
    const std::size_t at = nibble_begin_ + (j / 2) * g;
    pair_ = engine_.load(std::span<const std::uint8_t>(d_.base_nibbles).subspan(at, g),
                         engine_.all());
  }
  const LaneVector base =
      j % 2 == 0 ? engine_.shr4(pair_) : engine_.and_low_nibble(pair_);

  const std::size_t begin = d_.row_ptr[row_] + j * g;
  const std::size_t size = std::min(g, d_.row_ptr[row_ + 1] - begin);
  const Predicate active = engine_.first(size);

  // Masks are bounded by this row's slice of the stream.
  const auto row_masks = std::span<const LaneMask>(d_.masks).first(d_.mask_ptr[row_ + 1]);
  const LaneVector deltas = recompose_deltas(
      engine_, base, d_.tracking[group_begin_ + j], row_masks, mask_cursor_);

  const std::int64_t m = d_.slopes[row_];
  const std::int64_t dn = d_.intercept_deltas[group_begin_ + j];
  base_ = j == 0 ? dn : base_ + m * static_cast<std::int64_t>(g) + dn;

  out.base = base_;
  out.offsets = engine_.add_lane_index_scaled(deltas, d_.slopes[row_], active);
  out.active = active;
  out.element_begin = begin;
  out.size = size;
  return true;
}

DenseMatrixI8 decode_matrix(const DcsrMatrix& d) {
  VectorEngine engine(d.group_size);
  return decode_matrix(d, engine);
}

DenseMatrixI8 decode_matrix(const DcsrMatrix& d, VectorEngine& engine) {
  validate(d);
  const RowIndex index = build_row_index(d);
  DenseMatrixI8 m = DenseMatrixI8::Zero(d.rows, d.cols);
  for (std::size_t r = 0; r < d.rows; ++r) {
    RowGroupDecoder decoder(d, index, r, engine);
    DecodedGroup grp;
    std::int64_t last = -1;
    while (decoder.next(grp)) {
      for (std::size_t l = 0; l < grp.size; ++l) {
        const std::int64_t c = grp.base + grp.offsets[l];
        if (c <= last || c >= static_cast<std::int64_t>(d.cols)) {
          throw ConstraintError("decoded column " + std::to_string(c) +
                                " out of order or range in row " +
                                std::to_string(r));
        }
        last = c;
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            d.values[grp.element_begin + l];
      }
    }
  }
  return m;
}

namespace {

// Scalar reference decode of one row. Columns are returned as signed values
// so callers can range-check corrupt input; offsets beyond 8 bits throw.
std::vector<std::int64_t> decode_row_scalar(const DcsrMatrix& d,
                                            const RowIndex& index,
                                            std::size_t r) {
  const std::size_t g = d.group_size;
  const std::int64_t m = d.slopes[r];
  std::vector<std::int64_t> out;
  std::size_t mask = d.mask_ptr[r];
  std::int64_t base = 0;
  for (std::size_t j = 0; j < d.row_groups(r); ++j) {
    const std::uint8_t byte_shift = j % 2 == 0 ? 4 : 0;
    const std::size_t nib = index.nibble_begin[r] + (j / 2) * g;
    const std::uint8_t tracking = d.tracking[index.group_begin[r] + j];
    std::vector<LaneMask> group_masks;
    for (unsigned t = 0; t < kExtensionBits; ++t) {
      if ((tracking >> t) & 1u) group_masks.push_back(d.masks.at(mask++));
    }
    const std::int64_t dn = d.intercept_deltas[index.group_begin[r] + j];
    base = j == 0 ? dn : base + m * static_cast<std::int64_t>(g) + dn;

    const std::size_t begin = d.row_ptr[r] + j * g;
    const std::size_t size = std::min(g, d.row_ptr[r + 1] - begin);
    for (std::size_t i = 0; i < size; ++i) {
      std::int64_t delta = (d.base_nibbles[nib + i] >> byte_shift) & 0x0F;
      std::size_t k = 0;
      for (unsigned t = 0; t < kExtensionBits; ++t) {
        if (!((tracking >> t) & 1u)) continue;
        if ((group_masks[k++] >> i) & 1u) delta |= 1 << (kFirstExtensionBit + t);
      }
      const std::int64_t offset = static_cast<std::int64_t>(i) * m + delta;
      if (offset > 255) {
        throw ConstraintError("lane offset beyond 8 bits in row " +
                              std::to_string(r));
      }
      out.push_back(base + offset);
    }
  }
  return out;
}

void check_columns(const DcsrMatrix& d) {
  const RowIndex index = build_row_index(d);
  for (std::size_t r = 0; r < d.rows; ++r) {
    std::int64_t last = -1;
    for (std::int64_t c : decode_row_scalar(d, index, r)) {
      if (c <= last || c >= static_cast<std::int64_t>(d.cols)) {
        throw ConstraintError("decoded column " + std::to_string(c) +
                              " out of order or range in row " +
                              std::to_string(r));
      }
      last = c;
    }
  }
}

}  // namespace

std::vector<std::uint32_t> row_columns(const DcsrMatrix& d, std::size_t r) {
  validate(d);
  if (r >= d.rows) throw InvalidArgument("row out of range");
  const auto cols = decode_row_scalar(d, build_row_index(d), r);
  std::vector<std::uint32_t> out;
  out.reserve(cols.size());
  for (std::int64_t c : cols) {
    if (c < 0 || c >= static_cast<std::int64_t>(d.cols)) {
      throw ConstraintError("decoded column out of range");
    }
    out.push_back(static_cast<std::uint32_t>(c));
  }
  return out;
}

std::vector<std::uint8_t> serialize(const DcsrMatrix& d) {
  validate(d);
  detail::ByteWriter w;
  w.magic("DCSR");
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(d.group_size));
  w.u8(kBaseBits);
  w.u8(0);  // flags
  w.u32(d.rows);
  w.u32(d.cols);
  w.u32(static_cast<std::uint32_t>(d.values.size()));
  w.u32(static_cast<std::uint32_t>(d.tracking.size()));
  w.u32(static_cast<std::uint32_t>(d.masks.size()));

  for (std::uint32_t v : d.row_ptr) w.u32(v);
  w.align(kAlignment);
  for (std::uint16_t v : d.slopes) w.u16(v);
  w.align(kAlignment);
  for (std::uint32_t v : d.mask_ptr) w.u32(v);
  w.align(kAlignment);
  w.bytes(d.intercept_deltas);
  w.align(kAlignment);
  w.bytes(d.tracking);
  w.align(kAlignment);
  w.bytes(d.base_nibbles);
  w.align(kAlignment);
  for (LaneMask m : d.masks) {
    for (std::size_t b = 0; b < d.mask_bytes(); ++b) {
      w.u8(static_cast<std::uint8_t>(m >> (8 * b)));
    }
  }
  w.align(kAlignment);
  w.bytes(d.values);
  w.align(kAlignment);
  return w.take();
}

DcsrMatrix deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("DCSR");
  if (r.u8() != kVersion) throw FormatError("unsupported dCSR version");
  DcsrMatrix d;
  d.group_size = r.u8();
  if (!is_valid_group_size(d.group_size)) throw FormatError("invalid group size");
  if (r.u8() != kBaseBits) throw FormatError("unsupported base bit width");
  if (r.u8() != 0) throw FormatError("unsupported flags");
  d.rows = r.u32();
  d.cols = r.u32();
  if (d.rows == 0 || d.cols == 0) throw FormatError("zero matrix dimension");
  const std::uint32_t total_elements = r.u32();
  const std::uint32_t total_groups = r.u32();
  const std::uint32_t total_masks = r.u32();

  auto remaining_at_least = [&](std::size_t n) {
    if (n > bytes.size() - r.position()) throw FormatError("section overrun");
  };

  remaining_at_least((std::size_t{d.rows} + 1) * 4);
  d.row_ptr.resize(std::size_t{d.rows} + 1);
  for (auto& v : d.row_ptr) v = r.u32();
  r.align(kAlignment);
  remaining_at_least(std::size_t{d.rows} * 2);
  d.slopes.resize(d.rows);
  for (auto& v : d.slopes) v = r.u16();
  r.align(kAlignment);
  remaining_at_least((std::size_t{d.rows} + 1) * 4);
  d.mask_ptr.resize(std::size_t{d.rows} + 1);
  for (auto& v : d.mask_ptr) v = r.u32();
  r.align(kAlignment);

  if (d.row_ptr.back() != total_elements) {
    throw FormatError("row_ptr disagrees with element count");
  }
  std::size_t nibbles = 0;
  std::size_t groups = 0;
  for (std::size_t row = 0; row < d.rows; ++row) {
    if (d.row_ptr[row + 1] < d.row_ptr[row]) throw FormatError("row_ptr decreasing");
    const std::size_t row_groups = d.row_groups(row);
    groups += row_groups;
    nibbles += nibble_bytes(row_groups, d.group_size);
  }
  if (groups != total_groups) throw FormatError("group count mismatch");

  {
    auto s = r.take(total_groups, "intercept_deltas");
    d.intercept_deltas.assign(s.begin(), s.end());
  }
  r.align(kAlignment);
  {
    auto s = r.take(total_groups, "tracking");
    d.tracking.assign(s.begin(), s.end());
  }
  r.align(kAlignment);
  {
    auto s = r.take(nibbles, "base_nibbles");
    d.base_nibbles.assign(s.begin(), s.end());
  }
  r.align(kAlignment);
  {
    const std::size_t mb = d.mask_bytes();
    auto s = r.take(std::size_t{total_masks} * mb, "masks");
    d.masks.resize(total_masks);
    for (std::size_t k = 0; k < total_masks; ++k) {
      LaneMask m = 0;
      for (std::size_t b = 0; b < mb; ++b) {
        m |= LaneMask{s[k * mb + b]} << (8 * b);
      }
      d.masks[k] = m;
    }
  }
  r.align(kAlignment);
  {
    auto s = r.take(total_elements, "values");
    d.values.assign(s.begin(), s.end());
  }
  r.align(kAlignment);
  r.expect_end();

  try {
    validate(d);
    check_columns(d);
  } catch (const ConstraintError& e) {
    throw FormatError(std::string("inconsistent dCSR streams: ") + e.what());
  }
  return d;
}

FootprintBreakdown footprint(const DcsrMatrix& d) {
  FootprintBreakdown f;
  f.format = "dcsr";
  f.dense_bytes = std::size_t{d.rows} * d.cols;
  f.padding_bytes = static_cast<std::size_t>(
      std::count(d.values.begin(), d.values.end(), std::int8_t{0}));
  f.values_bytes = d.values.size() - f.padding_bytes;
  f.metadata_parts = {
      {"base_nibbles", d.base_nibbles.size()},
      {"tracking", d.tracking.size()},
      {"masks", d.masks.size() * d.mask_bytes()},
      {"intercept_deltas", d.intercept_deltas.size()},
      {"slopes", d.slopes.size() * 2},
      {"row_ptr", d.row_ptr.size() * 4},
      {"mask_ptr", d.mask_ptr.size() * 4},
  };
  finalize_footprint(f);
  return f;
}

}  // namespace dcsr
