// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/engine.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dcsr/dle.hpp"
#include "dcsr/error.hpp"

namespace dcsr {
namespace {

LaneMask low_bits(std::size_t count) {
  return count >= 32 ? ~LaneMask{0} : ((LaneMask{1} << count) - 1);
}

std::int32_t checked_i32(std::int64_t v, const char* op) {
  if (v < std::numeric_limits<std::int32_t>::min() ||
      v > std::numeric_limits<std::int32_t>::max()) {
    throw EngineFault(std::string(op) + ": 32-bit accumulator overflow");
  }
  return static_cast<std::int32_t>(v);
}

}  // namespace

Predicate::Predicate(LaneMask bits, std::size_t lanes)
    : bits_(bits & low_bits(lanes)), lanes_(lanes) {}

Predicate Predicate::all(std::size_t lanes) {
  return Predicate(low_bits(lanes), lanes);
}

Predicate Predicate::first(std::size_t count, std::size_t lanes) {
  return Predicate(low_bits(std::min(count, lanes)), lanes);
}

LaneVector::LaneVector(std::size_t lanes) : lanes_(lanes) {
  if (lanes > kMaxLanes) throw InvalidArgument("too many lanes");
}

LaneVector LaneVector::from(std::span<const std::uint8_t> values,
                            std::size_t lanes) {
  if (values.size() > lanes) {
    throw InvalidArgument("more values than lanes");
  }
  LaneVector v(lanes);
  std::copy(values.begin(), values.end(), v.data_.begin());
  return v;
}

bool LaneVector::operator==(const LaneVector& other) const {
  return lanes_ == other.lanes_ &&
         std::equal(data_.begin(), data_.begin() + lanes_, other.data_.begin());
}

Counters& Counters::operator+=(const Counters& other) {
  contiguous_loads += other.contiguous_loads;
  gather_loads += other.gather_loads;
  scatter_stores += other.scatter_stores;
  mac_lanes += other.mac_lanes;
  vector_ops += other.vector_ops;
  group_recompositions += other.group_recompositions;
  return *this;
}

std::map<std::string, std::uint64_t> Counters::snapshot() const {
  return {{"contiguous_loads", contiguous_loads},
          {"gather_loads", gather_loads},
          {"scatter_stores", scatter_stores},
          {"mac_lanes", mac_lanes},
          {"vector_ops", vector_ops},
          {"group_recompositions", group_recompositions}};
}

VectorEngine::VectorEngine(std::size_t lanes) : lanes_(lanes) {
  if (!is_valid_group_size(lanes)) {
    throw InvalidArgument("engine lane count must be one of 2, 4, 8, 16, 32");
  }
}

void VectorEngine::check_width(const LaneVector& v) const {
  if (v.lanes() != lanes_) throw EngineFault("lane vector width mismatch");
}

void VectorEngine::check_width(const Predicate& p) const {
  if (p.lanes() != lanes_) throw EngineFault("predicate width mismatch");
}

LaneVector VectorEngine::load(std::span<const std::uint8_t> src,
                              const Predicate& active) {
  check_width(active);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    if (l >= src.size()) throw EngineFault("contiguous load out of bounds");
    out[l] = src[l];
  }
  ++counters_.contiguous_loads;
  return out;
}

LaneVector VectorEngine::load(std::span<const std::int8_t> src,
                              const Predicate& active) {
  return load(std::span<const std::uint8_t>(
                  reinterpret_cast<const std::uint8_t*>(src.data()), src.size()),
              active);
}

void VectorEngine::store(std::span<std::int8_t> dst, const LaneVector& v,
                         const Predicate& active) {
  check_width(v);
  check_width(active);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    if (l >= dst.size()) throw EngineFault("contiguous store out of bounds");
    dst[l] = v.as_signed(l);
  }
  ++counters_.vector_ops;
}

LaneVector VectorEngine::transfer(std::span<const std::uint8_t> values) {
  ++counters_.vector_ops;
  return LaneVector::from(values, lanes_);
}

LaneVector VectorEngine::gather_i8(std::span<const std::int8_t> buffer,
                                   std::int64_t base, const LaneVector& offsets,
                                   const Predicate& active) {
  check_width(offsets);
  check_width(active);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    const std::int64_t addr = base + offsets[l];
    if (addr < 0 || addr >= static_cast<std::int64_t>(buffer.size())) {
      throw EngineFault("gather out of bounds at address " +
                        std::to_string(addr));
    }
    out[l] = static_cast<std::uint8_t>(buffer[static_cast<std::size_t>(addr)]);
  }
  ++counters_.gather_loads;
  return out;
}

void VectorEngine::scatter_i8(std::span<std::int8_t> buffer, std::int64_t base,
                              const LaneVector& offsets,
                              const LaneVector& values,
                              const Predicate& active) {
  check_width(offsets);
  check_width(values);
  check_width(active);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    const std::int64_t addr = base + offsets[l];
    if (addr < 0 || addr >= static_cast<std::int64_t>(buffer.size())) {
      throw EngineFault("scatter out of bounds at address " +
                        std::to_string(addr));
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (active[k] && offsets[k] == offsets[l]) {
        throw EngineFault("scatter with duplicate active offsets");
      }
    }
  }
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (active[l]) {
      buffer[static_cast<std::size_t>(base + offsets[l])] = values.as_signed(l);
    }
  }
  ++counters_.scatter_stores;
}

LaneVector VectorEngine::masked_or_const(const LaneVector& v, std::uint8_t c,
                                         const Predicate& active) {
  check_width(v);
  check_width(active);
  LaneVector out = v;
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (active[l]) out[l] = static_cast<std::uint8_t>(v[l] | c);
  }
  ++counters_.vector_ops;
  return out;
}

LaneVector VectorEngine::shr4(const LaneVector& v) {
  check_width(v);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) out[l] = v[l] >> 4;
  ++counters_.vector_ops;
  return out;
}

LaneVector VectorEngine::and_low_nibble(const LaneVector& v) {
  check_width(v);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) out[l] = v[l] & 0x0F;
  ++counters_.vector_ops;
  return out;
}

LaneVector VectorEngine::add_lane_const(const LaneVector& v, std::uint8_t c,
                                        const Predicate& active) {
  check_width(v);
  check_width(active);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    const unsigned sum = unsigned{v[l]} + c;
    if (sum > 255) throw EngineFault("add_lane_const overflows 8 bits");
    out[l] = static_cast<std::uint8_t>(sum);
  }
  ++counters_.vector_ops;
  return out;
}

LaneVector VectorEngine::add_lane_index_scaled(const LaneVector& v,
                                               std::uint32_t m,
                                               const Predicate& active) {
  check_width(v);
  check_width(active);
  LaneVector out(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (!active[l]) continue;
    const std::uint64_t sum = std::uint64_t{v[l]} + std::uint64_t{l} * m;
    if (sum > 255) throw EngineFault("lane offset overflows 8 bits");
    out[l] = static_cast<std::uint8_t>(sum);
  }
  ++counters_.vector_ops;
  return out;
}

std::int32_t VectorEngine::dot_acc_i32(const LaneVector& a, const LaneVector& b,
                                       const Predicate& active,
                                       std::int32_t acc) {
  check_width(a);
  check_width(b);
  check_width(active);
  std::int64_t sum = acc;
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (active[l]) {
      sum += std::int64_t{a.as_signed(l)} * std::int64_t{b.as_signed(l)};
    }
  }
  counters_.mac_lanes += active.count();
  ++counters_.vector_ops;
  return checked_i32(sum, "dot_acc_i32");
}

std::int32_t VectorEngine::sum_acc_i32(const LaneVector& a,
                                       const Predicate& active,
                                       std::int32_t acc) {
  check_width(a);
  check_width(active);
  std::int64_t sum = acc;
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (active[l]) sum += a.as_signed(l);
  }
  ++counters_.vector_ops;
  return checked_i32(sum, "sum_acc_i32");
}

}  // namespace dcsr
