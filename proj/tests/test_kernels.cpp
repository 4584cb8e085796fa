// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "dcsr/error.hpp"
#include "dcsr/kernels.hpp"

using namespace dcsr;

namespace {

// Plain loops, kept apart from the Eigen oracle on purpose.
MatrixI32 naive(const DenseMatrixI8& w, const DenseMatrixI8& a, std::int32_t zp,
                const VectorI32& bias) {
  MatrixI32 out(a.rows(), w.rows());
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      std::int64_t acc = bias.size() ? bias(r) : 0;
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        acc += std::int64_t{w(r, c)} * (std::int64_t{a(p, c)} - zp);
      }
      out(p, r) = static_cast<std::int32_t>(acc);
    }
  }
  return out;
}

VectorI32 random_bias(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int32_t> d(-5000, 5000);
  VectorI32 b(static_cast<Eigen::Index>(n));
  for (auto& v : b) v = d(rng);
  return b;
}

}  // namespace

TEST_CASE("requantize rounds half away from zero and clamps") {
  RequantSpec s;
  s.multiplier = 1;
  s.shift = 1;
  CHECK(requantize(3, s) == 2);    // 1.5 -> 2
  CHECK(requantize(-3, s) == -2);  // -1.5 -> -2
  CHECK(requantize(2, s) == 1);
  CHECK(requantize(-1, s) == -1);  // -0.5 -> -1
  s.shift = 0;
  CHECK(requantize(1000, s) == 127);
  CHECK(requantize(-1000, s) == -128);
  s.multiplier = 3;
  s.shift = 2;
  s.output_zero_point = -10;
  CHECK(requantize(10, s) == -2);  // 30 / 4 = 7.5 -> 8, -10
  MatrixI32 m(1, 2);
  m << 3, -3;
  s = RequantSpec{1, 1, 0};
  const auto q = requantize(m, s);
  CHECK(q(0, 0) == 2);
  CHECK(q(0, 1) == -2);
  CHECK_THROWS_AS(requantize(1, RequantSpec{0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(requantize(1, RequantSpec{1, 32, 0}), InvalidArgument);
}

TEST_CASE("dense oracle matches plain loops") {
  const auto w = generate_dense(9, 23, 1);
  const auto a = generate_dense(5, 23, 2);
  const VectorI32 bias = random_bias(9, 3);
  CHECK(dense_spmm(w, a, 7, bias) == naive(w, a, 7, bias));
  CHECK(dense_spmm(w, a, 0, VectorI32()) == naive(w, a, 0, VectorI32()));
  const VectorI8 x = a.row(1).transpose();
  const VectorI32 y = dense_spmv(w, x, -3, bias);
  const MatrixI32 ref = naive(w, a, -3, bias);
  for (Eigen::Index r = 0; r < 9; ++r) CHECK(y(r) == ref(1, r));
  CHECK_THROWS_AS(dense_spmm(w, generate_dense(2, 22, 1), 0, bias), InvalidArgument);
  CHECK_THROWS_AS(dense_spmm(w, a, 0, random_bias(8, 1)), InvalidArgument);
}

TEST_CASE("every kernel agrees with the oracle") {
  std::uint64_t seed = 500;
  for (std::size_t g : {2, 4, 8, 16, 32}) {
    for (double s : {0.0, 0.7, 0.95}) {
      const auto w = generate_uniform_sparse({29, 300, s, seed++});
      const auto a = generate_dense(6, 300, seed++);
      const VectorI32 bias = random_bias(29, seed++);
      const std::int32_t zp = static_cast<std::int32_t>(seed % 11) - 5;
      const MatrixI32 ref = dense_spmm(w, a, zp, bias);
      REQUIRE(ref == naive(w, a, zp, bias));
      const DcsrMatrix d = encode_matrix(w, g);
      const RiMatrix ri = encode_ri(w, 4);
      for (std::size_t threads : {1u, 3u}) {
        VectorEngine e(g);
        CHECK(dense_spmm(w, a, zp, bias, e, threads) == ref);
        CHECK(dcsr_spmm_vb(d, a, zp, bias, e, threads) == ref);
        CHECK(dcsr_spmm_ib(d, a, zp, bias, e, threads) == ref);
        CHECK(ri_spmm(ri, a, zp, bias, e, threads) == ref);
        const VectorI8 x = a.row(2).transpose();
        const VectorI32 y = dense_spmv(w, x, zp, bias);
        CHECK(dcsr_spmv(d, x, zp, bias, e, threads) == y);
        CHECK(ri_spmv(ri, x, zp, bias, e, threads) == y);
      }
    }
  }
}

TEST_CASE("counters reflect the access pattern") {
  const auto w = generate_uniform_sparse({40, 256, 0.9, 77});
  const auto a = generate_dense(4, 256, 78);
  const DcsrMatrix d = encode_matrix(w, 16);
  const std::size_t groups = d.intercept_deltas.size();

  VectorEngine spmv(16);
  const VectorI8 x = a.row(0).transpose();
  dcsr_spmv(d, x, 0, VectorI32(), spmv);
  CHECK(spmv.counters().gather_loads == groups);
  CHECK(spmv.counters().group_recompositions == groups);
  CHECK(spmv.counters().mac_lanes == d.values.size());
  CHECK(spmv.counters().scatter_stores == 0);

  VectorEngine vb(16);
  dcsr_spmm_vb(d, a, 0, VectorI32(), vb);
  CHECK(vb.counters().scatter_stores == groups);
  CHECK(vb.counters().gather_loads == 0);
  CHECK(vb.counters().group_recompositions == groups);

  VectorEngine ib(16);
  dcsr_spmm_ib(d, a, 0, VectorI32(), ib);
  CHECK(ib.counters().gather_loads == groups * 4);
  CHECK(ib.counters().scatter_stores == 0);
  CHECK(ib.counters().group_recompositions == groups);

  VectorEngine dense(16);
  dense_spmm(w, a, 0, VectorI32(), dense);
  CHECK(dense.counters().gather_loads == 0);
  CHECK(dense.counters().mac_lanes == 40u * 256u * 4u);

  VectorEngine threaded(16);
  dcsr_spmm_ib(d, a, 0, VectorI32(), threaded, 4);
  CHECK(threaded.counters() == ib.counters());
}

TEST_CASE("kernels reject mismatched engines and shapes") {
  const auto w = generate_uniform_sparse({4, 32, 0.5, 1});
  const DcsrMatrix d = encode_matrix(w, 16);
  VectorEngine wrong(8);
  const VectorI8 x = VectorI8::Zero(32);
  CHECK_THROWS_AS(dcsr_spmv(d, x, 0, VectorI32(), wrong), InvalidArgument);
  VectorEngine e(16);
  CHECK_THROWS_AS(dcsr_spmv(d, VectorI8::Zero(31), 0, VectorI32(), e), InvalidArgument);
}

TEST_CASE("small worked examples") {
  DenseMatrixI8 w(1, 2);
  w << 1, 2;
  VectorI8 x(2);
  x << 3, 4;
  CHECK(dense_spmv(w, x, 0, VectorI32())(0) == 11);
  CHECK(dense_spmv(w, x, 1, VectorI32())(0) == 8);
  CHECK(requantize(100, RequantSpec{1, 0, 0}) == 100);
  CHECK(requantize(5, RequantSpec{1, 1, 0}) == 3);

  // All-zero weights leave only the bias.
  const DenseMatrixI8 zero = DenseMatrixI8::Zero(3, 20);
  VectorI32 bias(3);
  bias << 7, -8, 9;
  VectorEngine e(16);
  const VectorI8 ones = VectorI8::Constant(20, 1);
  CHECK(dcsr_spmv(encode_matrix(zero, 16), ones, 4, bias, e) == bias);
  const MatrixI32 out = dcsr_spmm_vb(encode_matrix(zero, 16), generate_dense(2, 20, 1), 0, bias, e);
  CHECK(out.row(1).transpose() == bias);
}

TEST_CASE("requantize is monotone in the accumulator") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const RequantSpec s{std::uniform_int_distribution<std::int32_t>(1, 1 << 16)(rng),
                        static_cast<std::uint8_t>(rng() % 32),
                        static_cast<std::int16_t>(static_cast<int>(rng() % 64) - 32)};
    std::int32_t acc = std::uniform_int_distribution<std::int32_t>(-1 << 24, 1 << 24)(rng);
    std::int8_t prev = requantize(acc, s);
    for (int k = 0; k < 100; ++k) {
      acc += std::uniform_int_distribution<std::int32_t>(0, 5000)(rng);
      const std::int8_t q = requantize(acc, s);
      REQUIRE(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("RI worked example uses one padding lane") {
  DenseMatrixI8 w = DenseMatrixI8::Zero(1, 32);
  w(0, 0) = 2;
  w(0, 20) = -3;
  const RiMatrix ri = encode_ri(w, 4);
  VectorI8 x(32);
  for (int i = 0; i < 32; ++i) x(i) = static_cast<std::int8_t>(i + 1);
  VectorEngine e(16);
  CHECK(ri_spmv(ri, x, 0, VectorI32(), e) == dense_spmv(w, x, 0, VectorI32()));
  CHECK(e.counters().mac_lanes == 3);
}
