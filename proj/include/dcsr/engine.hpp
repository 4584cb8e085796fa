// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Portable model of an embedded SIMD unit with g lanes of 8-bit data,
// per-lane predication, gather/scatter with unsigned 8-bit offsets plus a
// scalar base, and widening dot-product accumulation. Every operation bumps
// event counters that stand in for cycle measurements.

#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace dcsr {

inline constexpr std::size_t kMaxLanes = 32;

// Lane i of a mask is bit i (LSB = lane 0).
using LaneMask = std::uint32_t;

class Predicate {
 public:
  Predicate() = default;
  Predicate(LaneMask bits, std::size_t lanes);

  static Predicate all(std::size_t lanes);
  static Predicate none(std::size_t lanes) { return Predicate(0, lanes); }
  // Lanes [0, count) active.
  static Predicate first(std::size_t count, std::size_t lanes);

  bool operator[](std::size_t lane) const { return (bits_ >> lane) & 1u; }
  LaneMask bits() const { return bits_; }
  std::size_t lanes() const { return lanes_; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::popcount(bits_));
  }

  bool operator==(const Predicate&) const = default;

 private:
  LaneMask bits_ = 0;
  std::size_t lanes_ = 0;
};

class LaneVector {
 public:
  LaneVector() = default;
  explicit LaneVector(std::size_t lanes);
  // Lanes beyond values.size() are zero.
  static LaneVector from(std::span<const std::uint8_t> values,
                         std::size_t lanes);

  std::size_t lanes() const { return lanes_; }
  std::uint8_t& operator[](std::size_t lane) { return data_[lane]; }
  std::uint8_t operator[](std::size_t lane) const { return data_[lane]; }
  std::int8_t as_signed(std::size_t lane) const {
    return static_cast<std::int8_t>(data_[lane]);
  }
  std::span<const std::uint8_t> view() const { return {data_.data(), lanes_}; }

  bool operator==(const LaneVector& other) const;

 private:
  std::array<std::uint8_t, kMaxLanes> data_{};
  std::size_t lanes_ = 0;
};

struct Counters {
  std::uint64_t contiguous_loads = 0;
  std::uint64_t gather_loads = 0;
  std::uint64_t scatter_stores = 0;
  std::uint64_t mac_lanes = 0;
  std::uint64_t vector_ops = 0;
  // DBE group recompositions (base nibbles + extension masks -> deltas).
  std::uint64_t group_recompositions = 0;

  Counters& operator+=(const Counters& other);
  bool operator==(const Counters&) const = default;

  // Flat key -> count view for reports.
  std::map<std::string, std::uint64_t> snapshot() const;
};

class VectorEngine {
 public:
  explicit VectorEngine(std::size_t lanes = 16);

  std::size_t lanes() const { return lanes_; }
  const Counters& counters() const { return counters_; }
  Counters& counters() { return counters_; }
  void reset_counters() { counters_ = {}; }

  Predicate all() const { return Predicate::all(lanes_); }
  Predicate first(std::size_t count) const {
    return Predicate::first(count, lanes_);
  }

  // Contiguous predicated load of src[0..lanes); inactive lanes read as 0
  // and are never touched.
  LaneVector load(std::span<const std::uint8_t> src, const Predicate& active);
  LaneVector load(std::span<const std::int8_t> src, const Predicate& active);
  // Contiguous predicated store.
  void store(std::span<std::int8_t> dst, const LaneVector& v,
             const Predicate& active);
  // Moves scalar-computed lane values into a vector register.
  LaneVector transfer(std::span<const std::uint8_t> values);

  // lane l = buffer[base + offsets[l]] where active, else 0. Out-of-bounds
  // active lanes fault.
  LaneVector gather_i8(std::span<const std::int8_t> buffer, std::int64_t base,
                       const LaneVector& offsets, const Predicate& active);
  // buffer[base + offsets[l]] = values[l] for active lanes. Duplicate active
  // offsets fault.
  void scatter_i8(std::span<std::int8_t> buffer, std::int64_t base,
                  const LaneVector& offsets, const LaneVector& values,
                  const Predicate& active);

  LaneVector masked_or_const(const LaneVector& v, std::uint8_t c,
                             const Predicate& active);
  LaneVector shr4(const LaneVector& v);
  LaneVector and_low_nibble(const LaneVector& v);
  // v[l] + c on active lanes (0 elsewhere); faults beyond 8 bits.
  LaneVector add_lane_const(const LaneVector& v, std::uint8_t c,
                            const Predicate& active);
  // v[l] + l * m on active lanes (0 elsewhere); faults beyond 8 bits.
  LaneVector add_lane_index_scaled(const LaneVector& v, std::uint32_t m,
                                   const Predicate& active);

  // acc + sum over active lanes of a[l] * b[l] (signed). Faults when the
  // result leaves the 32-bit range.
  std::int32_t dot_acc_i32(const LaneVector& a, const LaneVector& b,
                           const Predicate& active, std::int32_t acc);
  // acc + sum over active lanes of a[l] (signed).
  std::int32_t sum_acc_i32(const LaneVector& a, const Predicate& active,
                           std::int32_t acc);

  void note_recomposition() { ++counters_.group_recompositions; }

 private:
  void check_width(const LaneVector& v) const;
  void check_width(const Predicate& p) const;

  std::size_t lanes_;
  Counters counters_;
};

}  // namespace dcsr
