// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Quantized SpMV / SpMM kernels. All kernels compute
//
//   y[r] = sum_c W[r, c] * (x[c] - x_zero_point) + bias[r]
//
// exactly in integers (weights are symmetric, zero point 0). SpMM
// activations are pixel-major / channel-minor (pixels x cols) and the output
// is pixels x rows. The dense_* overloads without an engine are the scalar
// oracle; everything else runs on a VectorEngine and must match it bit for
// bit.

#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "dcsr/baselines.hpp"
#include "dcsr/container.hpp"
#include "dcsr/engine.hpp"
#include "dcsr/matrix.hpp"

namespace dcsr {

struct RequantSpec {
  std::int32_t multiplier = 1;  // > 0
  std::uint8_t shift = 0;       // 0..31
  std::int16_t output_zero_point = 0;

  void validate() const;
};

// clamp(zp + round_half_away_from_zero(acc * multiplier / 2^shift))
std::int8_t requantize(std::int32_t acc, const RequantSpec& spec);

template <typename Derived>
auto requantize(const Eigen::MatrixBase<Derived>& acc, const RequantSpec& spec) {
  spec.validate();
  return acc.unaryExpr([spec](std::int32_t a) { return requantize(a, spec); })
      .eval();
}

// Empty bias means zero bias.
VectorI32 dense_spmv(const DenseMatrixI8& w, const VectorI8& x,
                     std::int32_t x_zero_point, const VectorI32& bias);
MatrixI32 dense_spmm(const DenseMatrixI8& w, const DenseMatrixI8& a,
                     std::int32_t x_zero_point, const VectorI32& bias);

// Instrumented dense kernel: contiguous loads and full-width MACs.
MatrixI32 dense_spmm(const DenseMatrixI8& w, const DenseMatrixI8& a,
                     std::int32_t x_zero_point, const VectorI32& bias,
                     VectorEngine& engine, std::size_t threads = 1);

// Direct extraction: every group gathers from x at its base pointer.
VectorI32 dcsr_spmv(const DcsrMatrix& w, const VectorI8& x,
                    std::int32_t x_zero_point, const VectorI32& bias,
                    VectorEngine& engine, std::size_t threads = 1);

// Value buffering: decode each weight row once, scatter it into a zeroed
// dense row buffer, then run dense dot products against every pixel.
MatrixI32 dcsr_spmm_vb(const DcsrMatrix& w, const DenseMatrixI8& a,
                       std::int32_t x_zero_point, const VectorI32& bias,
                       VectorEngine& engine, std::size_t threads = 1);

// Index buffering: decode each weight row once into gather offsets and base
// pointer steps, then gather the activations of every pixel.
MatrixI32 dcsr_spmm_ib(const DcsrMatrix& w, const DenseMatrixI8& a,
                       std::int32_t x_zero_point, const VectorI32& bias,
                       VectorEngine& engine, std::size_t threads = 1);

// Relative indexing: scalar cumulative-sum index extraction per run, then
// vector gather and MAC.
VectorI32 ri_spmv(const RiMatrix& w, const VectorI8& x,
                  std::int32_t x_zero_point, const VectorI32& bias,
                  VectorEngine& engine, std::size_t threads = 1);
MatrixI32 ri_spmm(const RiMatrix& w, const DenseMatrixI8& a,
                  std::int32_t x_zero_point, const VectorI32& bias,
                  VectorEngine& engine, std::size_t threads = 1);

}  // namespace dcsr
