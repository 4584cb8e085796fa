// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "dcsr/dbe.hpp"
#include "dcsr/error.hpp"

using namespace dcsr;

TEST_CASE("decompose_group splits base nibbles and extension masks") {
  SUBCASE("small deltas need no masks") {
    const std::vector<std::uint8_t> d = {0, 0, 1, 0};
    const EncodedGroup e = decompose_group(d, 4);
    CHECK(e.base_nibbles == d);
    CHECK(e.tracking == 0);
    CHECK(e.masks.empty());
  }
  SUBCASE("bit 4 and bit 6") {
    // 17 = 0b0010001, 64 = 0b1000000, 80 = 0b1010000
    const std::vector<std::uint8_t> d = {17, 0, 64, 80};
    const EncodedGroup e = decompose_group(d, 4);
    CHECK(e.base_nibbles == std::vector<std::uint8_t>{1, 0, 0, 0});
    CHECK(e.tracking == 0b101);
    REQUIRE(e.masks.size() == 2);
    CHECK(e.masks[0] == 0b1001u);  // lanes 0 and 3 carry bit 4
    CHECK(e.masks[1] == 0b1100u);  // lanes 2 and 3 carry bit 6
  }
  SUBCASE("maximum delta uses all three") {
    const std::vector<std::uint8_t> d = {127};
    const EncodedGroup e = decompose_group(d, 2);
    CHECK(e.base_nibbles == std::vector<std::uint8_t>{15});
    CHECK(e.tracking == 0b111);
    CHECK(e.masks == std::vector<LaneMask>{1, 1, 1});
  }
  SUBCASE("rejects") {
    const std::vector<std::uint8_t> big = {128};
    CHECK_THROWS_AS(decompose_group(big, 4), InvalidArgument);
    const std::vector<std::uint8_t> too_many(5, 0);
    CHECK_THROWS_AS(decompose_group(too_many, 4), InvalidArgument);
  }
}

TEST_CASE("recompose_group round-trips every delta vector") {
  std::mt19937_64 rng(7);
  for (std::size_t g : {2, 4, 8, 16, 32}) {
    VectorEngine engine(g);
    for (int t = 0; t < 500; ++t) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, g)(rng);
      std::vector<std::uint8_t> d(n);
      for (auto& v : d) v = std::uniform_int_distribution<int>(0, 127)(rng) >> (t % 7);
      const EncodedGroup e = decompose_group(d, g);
      const auto back = recompose_group(e, engine);
      REQUIRE(back.size() == n);
      REQUIRE(back == d);
    }
    CHECK(engine.counters().group_recompositions == 500);
  }
}

TEST_CASE("recompose_deltas consumes masks through the cursor") {
  VectorEngine engine(4);
  const std::vector<std::uint8_t> base = {1, 2, 3, 4};
  const LaneVector b = LaneVector::from(base, 4);
  const std::vector<LaneMask> masks = {0b0001, 0b0010, 0b1000};
  std::size_t cursor = 0;
  const LaneVector a = recompose_deltas(engine, b, 0b011, masks, cursor);
  CHECK(cursor == 2);
  CHECK(a[0] == 17);
  CHECK(a[1] == 34);
  CHECK(a[2] == 3);
  CHECK(a[3] == 4);
  const LaneVector c = recompose_deltas(engine, b, 0b100, masks, cursor);
  CHECK(cursor == 3);
  CHECK(c[3] == 68);
  // Underrun and reserved tracking bits are format errors.
  CHECK_THROWS_AS(recompose_deltas(engine, b, 0b001, masks, cursor), ConstraintError);
  cursor = 0;
  CHECK_THROWS_AS(recompose_deltas(engine, b, 0b1000, masks, cursor), ConstraintError);
}

TEST_CASE("nibble interleaving") {
  SUBCASE("pair of groups") {
    const std::vector<std::uint8_t> upper = {0, 0, 1, 0};
    const std::vector<std::uint8_t> lower = {0, 0};
    CHECK(interleave_pair(upper, lower, 4) ==
          std::vector<std::uint8_t>{0x00, 0x00, 0x10, 0x00});
  }
  SUBCASE("upper and lower nibble placement") {
    const std::vector<std::uint8_t> upper = {0xA, 0x3};
    const std::vector<std::uint8_t> lower = {0x5, 0xF};
    const auto bytes = interleave_pair(upper, lower, 2);
    CHECK(bytes == std::vector<std::uint8_t>{0xA5, 0x3F});
    const auto [u, l] = deinterleave_pair(bytes, 2);
    CHECK(u == upper);
    CHECK(l == lower);
    VectorEngine engine(2);
    const auto [vu, vl] = deinterleave_pair(engine, LaneVector::from(bytes, 2));
    CHECK(vu[0] == 0xA);
    CHECK(vu[1] == 0x3);
    CHECK(vl[0] == 0x5);
    CHECK(vl[1] == 0xF);
  }
  SUBCASE("odd trailing group has an empty lower nibble") {
    EncodedGroup e;
    e.base_nibbles = {7, 9, 1};
    CHECK(interleave_pair(e, nullptr, 4) ==
          std::vector<std::uint8_t>{0x70, 0x90, 0x10, 0x00});
  }
  SUBCASE("rejects nibbles above 15") {
    const std::vector<std::uint8_t> bad = {16};
    CHECK_THROWS_AS(interleave_pair(bad, std::vector<std::uint8_t>{}, 2), InvalidArgument);
  }
}
