// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/dbe.hpp"

#include <bit>
#include <string>

#include "dcsr/dle.hpp"
#include "dcsr/error.hpp"

namespace dcsr {

EncodedGroup decompose_group(std::span<const std::uint8_t> lane_deltas,
                             std::size_t g) {
  if (!is_valid_group_size(g)) throw InvalidArgument("invalid group size");
  if (lane_deltas.size() > g) throw InvalidArgument("group has more than g lanes");
  EncodedGroup enc;
  enc.base_nibbles.reserve(lane_deltas.size());
  for (std::uint8_t v : lane_deltas) {
    if (v > kMaxLaneDelta) {
      throw InvalidArgument("lane delta exceeds 127: " + std::to_string(v));
    }
    enc.base_nibbles.push_back(v & 0x0F);
  }
  for (unsigned t = 0; t < kExtensionBits; ++t) {
    LaneMask mask = 0;
    for (std::size_t i = 0; i < lane_deltas.size(); ++i) {
      if ((lane_deltas[i] >> (kFirstExtensionBit + t)) & 1u) {
        mask |= LaneMask{1} << i;
      }
    }
    if (mask != 0) {
      enc.tracking |= static_cast<std::uint8_t>(1u << t);
      enc.masks.push_back(mask);
    }
  }
  return enc;
}

LaneVector recompose_deltas(VectorEngine& engine, const LaneVector& base,
                            std::uint8_t tracking,
                            std::span<const LaneMask> masks,
                            std::size_t& cursor) {
  if (tracking >> kExtensionBits) {
    throw ConstraintError("tracking bitmap uses reserved bits");
  }
  LaneVector v = base;
  for (unsigned t = 0; t < kExtensionBits; ++t) {
    if (!((tracking >> t) & 1u)) continue;
    if (cursor >= masks.size()) throw ConstraintError("extension mask underrun");
    const Predicate lanes(masks[cursor++], engine.lanes());
    v = engine.masked_or_const(
        v, static_cast<std::uint8_t>(1u << (kFirstExtensionBit + t)), lanes);
  }
  engine.note_recomposition();
  return v;
}

std::vector<std::uint8_t> recompose_group(const EncodedGroup& enc,
                                          VectorEngine& engine) {
  if (enc.base_nibbles.size() > engine.lanes()) {
    throw InvalidArgument("group wider than engine");
  }
  if (static_cast<std::size_t>(std::popcount(enc.tracking)) != enc.masks.size()) {
    throw ConstraintError("tracking bitmap disagrees with mask count");
  }
  const Predicate present = engine.first(enc.base_nibbles.size());
  const LaneVector base = engine.load(enc.base_nibbles, present);
  std::size_t cursor = 0;
  const LaneVector v =
      recompose_deltas(engine, base, enc.tracking, enc.masks, cursor);
  const auto lanes = v.view().first(enc.base_nibbles.size());
  return {lanes.begin(), lanes.end()};
}

std::vector<std::uint8_t> interleave_pair(std::span<const std::uint8_t> upper,
                                          std::span<const std::uint8_t> lower,
                                          std::size_t g) {
  if (upper.size() > g || lower.size() > g) {
    throw InvalidArgument("nibble group wider than g");
  }
  for (auto n : upper) if (n > 0x0F) throw InvalidArgument("base nibble above 15");
  for (auto n : lower) if (n > 0x0F) throw InvalidArgument("base nibble above 15");
  std::vector<std::uint8_t> out(g, 0);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((upper[i] & 0x0F) << 4);
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    out[i] |= lower[i] & 0x0F;
  }
  return out;
}

std::vector<std::uint8_t> interleave_pair(const EncodedGroup& upper,
                                          const EncodedGroup* lower,
                                          std::size_t g) {
  return interleave_pair(
      upper.base_nibbles,
      lower ? std::span<const std::uint8_t>(lower->base_nibbles)
            : std::span<const std::uint8_t>(),
      g);
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
deinterleave_pair(std::span<const std::uint8_t> bytes, std::size_t g) {
  if (bytes.size() != g) throw InvalidArgument("expected g interleaved bytes");
  std::vector<std::uint8_t> upper(g), lower(g);
  for (std::size_t i = 0; i < g; ++i) {
    upper[i] = bytes[i] >> 4;
    lower[i] = bytes[i] & 0x0F;
  }
  return {std::move(upper), std::move(lower)};
}

std::pair<LaneVector, LaneVector> deinterleave_pair(VectorEngine& engine,
                                                    const LaneVector& bytes) {
  return {engine.shr4(bytes), engine.and_low_nibble(bytes)};
}

}  // namespace dcsr
