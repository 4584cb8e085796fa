// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "dcsr/container.hpp"
#include "dcsr/error.hpp"
#include "dcsr/matrix.hpp"

using namespace dcsr;

namespace {

std::vector<std::uint8_t> read_hex(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::uint8_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(static_cast<std::uint8_t>(std::stoul(tok, nullptr, 16)));
  }
  return out;
}

DenseMatrixI8 example_row() {
  DenseMatrixI8 m = DenseMatrixI8::Zero(1, 16);
  const int cols[] = {0, 3, 7, 9, 12, 15};
  for (int i = 0; i < 6; ++i) m(0, cols[i]) = static_cast<std::int8_t>(i + 1);
  return m;
}

}  // namespace

TEST_CASE("encode the 1x16 example") {
  const DcsrMatrix d = encode_matrix(example_row(), 4);
  CHECK(d.row_ptr == std::vector<std::uint32_t>{0, 6});
  CHECK(d.slopes == std::vector<std::uint16_t>{3});
  CHECK(d.mask_ptr == std::vector<std::uint32_t>{0, 0});
  CHECK(d.intercept_deltas == std::vector<std::int8_t>{0, 0});
  CHECK(d.tracking == std::vector<std::uint8_t>{0, 0});
  CHECK(d.base_nibbles == std::vector<std::uint8_t>{0x00, 0x00, 0x10, 0x00});
  CHECK(d.masks.empty());
  CHECK(d.values == std::vector<std::int8_t>{1, 2, 3, 4, 5, 6});
  CHECK(row_columns(d, 0) == std::vector<std::uint32_t>{0, 3, 7, 9, 12, 15});
  CHECK(decode_matrix(d) == example_row());
}

TEST_CASE("serialization matches the golden bytes") {
  const DcsrMatrix d = encode_matrix(example_row(), 4);
  const auto golden = read_hex(std::string(DCSR_TEST_DATA_DIR) + "/dcsr_1x16_g4.golden");
  CHECK(golden.size() == 68);
  CHECK(serialize(d) == golden);
  CHECK(deserialize(golden) == d);
}

TEST_CASE("footprint of the 1x16 example") {
  const FootprintBreakdown f = footprint(encode_matrix(example_row(), 4));
  CHECK(f.format == "dcsr");
  CHECK(f.dense_bytes == 16);
  CHECK(f.values_bytes == 6);
  CHECK(f.padding_bytes == 0);
  CHECK(f.metadata_parts.at("base_nibbles") == 4);
  CHECK(f.metadata_parts.at("tracking") == 2);
  CHECK(f.metadata_parts.at("intercept_deltas") == 2);
  CHECK(f.metadata_parts.at("slopes") == 2);
  CHECK(f.metadata_parts.at("row_ptr") == 8);
  CHECK(f.metadata_parts.at("mask_ptr") == 8);
  CHECK(f.metadata_bytes == 26);
  CHECK(f.total_bytes == 32);
}

TEST_CASE("padding elements decode to zero") {
  DenseMatrixI8 m = DenseMatrixI8::Zero(2, 300);
  m(0, 0) = 5;
  m(0, 299) = -7;
  m(1, 100) = 1;
  const DcsrMatrix d = encode_matrix(m, 2);
  CHECK(d.row_elements(0) == 3);
  CHECK(d.values[1] == 0);
  CHECK(decode_matrix(d) == m);
  const FootprintBreakdown f = footprint(d);
  CHECK(f.values_bytes == 3);
  CHECK(f.padding_bytes == 1);
}

TEST_CASE("round trip over random matrices, all group sizes") {
  std::uint64_t seed = 11;
  for (std::size_t g : {2, 4, 8, 16, 32}) {
    for (double s : {0.0, 0.5, 0.9, 0.99}) {
      const auto m = generate_uniform_sparse({37, 411, s, seed++});
      const DcsrMatrix d = encode_matrix(m, g);
      REQUIRE_NOTHROW(validate(d));
      REQUIRE(decode_matrix(d) == m);
      VectorEngine engine(g);
      REQUIRE(decode_matrix(d, engine) == m);
      CHECK(engine.counters().group_recompositions ==
            d.intercept_deltas.size());
      const auto bytes = serialize(d);
      CHECK(bytes.size() % 4 == 0);
      REQUIRE(deserialize(bytes) == d);
    }
  }
}

TEST_CASE("empty rows and an all-zero matrix") {
  DenseMatrixI8 m = DenseMatrixI8::Zero(3, 20);
  const DcsrMatrix z = encode_matrix(m, 16);
  CHECK(z.values.empty());
  CHECK(decode_matrix(z) == m);
  CHECK(deserialize(serialize(z)) == z);
  m(1, 19) = 3;
  const DcsrMatrix d = encode_matrix(m, 16);
  CHECK(d.row_elements(0) == 0);
  CHECK(d.row_elements(2) == 0);
  CHECK(decode_matrix(d) == m);
}

TEST_CASE("row decoder produces absolute offsets per group") {
  const DcsrMatrix d = encode_matrix(example_row(), 4);
  const RowIndex index = build_row_index(d);
  VectorEngine engine(4);
  RowGroupDecoder dec(d, index, 0, engine);
  CHECK(dec.groups() == 2);
  DecodedGroup grp;
  REQUIRE(dec.next(grp));
  CHECK(grp.base == 0);
  CHECK(grp.size == 4);
  CHECK(grp.offsets[1] == 3);
  CHECK(grp.offsets[2] == 7);
  REQUIRE(dec.next(grp));
  CHECK(grp.base == 12);
  CHECK(grp.element_begin == 4);
  CHECK(grp.active.count() == 2);
  CHECK(grp.offsets[1] == 3);
  CHECK_FALSE(dec.next(grp));
}

TEST_CASE("deserialize rejects malformed input") {
  const DcsrMatrix d = encode_matrix(example_row(), 4);
  const auto good = serialize(d);
  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad[4] = 2;  // version
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad[5] = 3;  // group size
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad.pop_back();
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad[38] = 0x01;  // alignment fill after the slope
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad[52] = 0x08;  // reserved tracking bit
  CHECK_THROWS_AS(deserialize(bad), FormatError);
  bad = good;
  bad[59] = 0xF0;  // pushes a column past cols
  CHECK_THROWS_AS(deserialize(bad), FormatError);
}

TEST_CASE("encode rejects out-of-range input") {
  CHECK_THROWS_AS(encode_matrix(example_row(), 3), InvalidArgument);
  CHECK_THROWS(encode_matrix(DenseMatrixI8(0, 4), 4));
}

TEST_CASE("footprint equals the serialized core sections") {
  for (std::size_t g : {2, 4, 8, 16, 32}) {
    const auto m = generate_uniform_sparse({50, 333, 0.9, 40 + g});
    const DcsrMatrix d = encode_matrix(m, g);
    const FootprintBreakdown f = footprint(d);
    std::size_t serialized = 28;
    for (const auto& [name, bytes] : f.metadata_parts) serialized += (bytes + 3) / 4 * 4;
    serialized += (d.values.size() + 3) / 4 * 4;
    CHECK(serialize(d).size() == serialized);
    CHECK(f.values_bytes + f.padding_bytes == d.values.size());
    CHECK(f.total_bytes == f.values_bytes + f.padding_bytes + f.metadata_bytes);
  }
}

TEST_CASE("all-zero 8x8 has only row tables") {
  const DcsrMatrix d = encode_matrix(DenseMatrixI8::Zero(8, 8), 16);
  CHECK(d.row_ptr == std::vector<std::uint32_t>(9, 0));
  const FootprintBreakdown f = footprint(d);
  CHECK(f.values_bytes == 0);
  CHECK(f.padding_bytes == 0);
  CHECK(f.metadata_bytes == 9 * 4 + 9 * 4 + 8 * 2);
}
