// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Dynamic bitwidth extension of one group of lane deltas.
//
// Each delta (<= 127) is split into a 4-bit base nibble and up to three
// extension bitmasks for bit positions 4, 5 and 6. A mask is stored only if
// some lane of the group has that bit set; a 3-bit tracking bitmap records
// which masks exist. Two consecutive groups share one byte per lane: the
// first group's nibbles in the upper half, the second group's in the lower.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dcsr/engine.hpp"

namespace dcsr {

inline constexpr unsigned kBaseBits = 4;
inline constexpr unsigned kFirstExtensionBit = 4;
inline constexpr unsigned kExtensionBits = 3;
inline constexpr std::uint8_t kMaxLaneDelta = 127;

struct EncodedGroup {
  std::vector<std::uint8_t> base_nibbles;  // one per present lane
  std::uint8_t tracking = 0;               // bit t <=> mask for bit 4 + t
  std::vector<LaneMask> masks;             // ascending bit position

  bool operator==(const EncodedGroup&) const = default;
};

// Throws InvalidArgument for deltas > 127 or more than g lanes.
EncodedGroup decompose_group(std::span<const std::uint8_t> lane_deltas,
                             std::size_t g);

// Core recomposition step shared with the matrix decoder: ORs 2^b into the
// lanes of each tracked mask, consuming masks[cursor...] in order. Throws
// ConstraintError on mask underrun.
LaneVector recompose_deltas(VectorEngine& engine, const LaneVector& base,
                            std::uint8_t tracking,
                            std::span<const LaneMask> masks,
                            std::size_t& cursor);

// Inverse of decompose_group. Throws ConstraintError if the tracking bitmap
// disagrees with the number of masks.
std::vector<std::uint8_t> recompose_group(const EncodedGroup& enc,
                                          VectorEngine& engine);

// byte[i] = (upper.nibble[i] << 4) | lower.nibble[i]; missing lanes are 0.
std::vector<std::uint8_t> interleave_pair(const EncodedGroup& upper,
                                          const EncodedGroup* lower,
                                          std::size_t g);
std::vector<std::uint8_t> interleave_pair(std::span<const std::uint8_t> upper,
                                          std::span<const std::uint8_t> lower,
                                          std::size_t g);

// (upper nibbles, lower nibbles), g of each.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
deinterleave_pair(std::span<const std::uint8_t> bytes, std::size_t g);
std::pair<LaneVector, LaneVector> deinterleave_pair(VectorEngine& engine,
                                                    const LaneVector& bytes);

}  // namespace dcsr
