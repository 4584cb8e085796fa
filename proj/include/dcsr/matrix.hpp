// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dcsr {

template <typename Scalar>
using RowMajorMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row-major signed 8-bit matrix. Weights are stored rows x cols; SpMM
// activations are stored pixels x channels.
using DenseMatrixI8 = RowMajorMatrix<std::int8_t>;
using MatrixI32 = RowMajorMatrix<std::int32_t>;
using VectorI8 = Vector<std::int8_t>;
using VectorI32 = Vector<std::int32_t>;

struct SparseRow {
  std::vector<std::uint32_t> columns;  // strictly ascending
  std::vector<std::int8_t> values;
};

struct QuantizationParams {
  std::int16_t input_zero_point = 0;
  std::int16_t output_zero_point = 0;
  std::int32_t multiplier = 1;
  std::uint8_t shift = 0;
};

struct GeneratorSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument unless rows >= 1 and cols >= 1.
void require_valid_dims(std::size_t rows, std::size_t cols);

// Number of non-zeros the generator produces for `spec`:
// round((1 - sparsity) * rows * cols).
std::size_t expected_nonzeros(const GeneratorSpec& spec);

// Uniformly random pruning pattern with an exact non-zero count. Kept values
// are drawn uniformly from [-127, 127] \ {0}. Deterministic in `spec`.
DenseMatrixI8 generate_uniform_sparse(const GeneratorSpec& spec);

// Uniform random dense data in [-128, 127], e.g. for activations.
DenseMatrixI8 generate_dense(std::size_t rows, std::size_t cols,
                             std::uint64_t seed);

std::vector<SparseRow> to_sparse_rows(const DenseMatrixI8& m);
DenseMatrixI8 densify(std::size_t rows, std::size_t cols,
                      const std::vector<SparseRow>& sparse);

std::size_t count_nonzeros(const DenseMatrixI8& m);

}  // namespace dcsr
