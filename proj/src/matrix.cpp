// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "dcsr/error.hpp"

namespace dcsr {

void require_valid_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InvalidArgument("matrix dimensions must be at least 1x1, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::size_t expected_nonzeros(const GeneratorSpec& spec) {
  const double total = static_cast<double>(spec.rows) *
                       static_cast<double>(spec.cols);
  return static_cast<std::size_t>(std::llround((1.0 - spec.sparsity) * total));
}

DenseMatrixI8 generate_uniform_sparse(const GeneratorSpec& spec) {
  require_valid_dims(spec.rows, spec.cols);
  if (!(spec.sparsity >= 0.0 && spec.sparsity < 1.0)) {
    throw InvalidArgument("sparsity must lie in [0, 1), got " +
                          std::to_string(spec.sparsity));
  }
  const std::size_t total = spec.rows * spec.cols;
  const std::size_t nnz = std::min(expected_nonzeros(spec), total);

  std::mt19937_64 rng(spec.seed);
  // Partial Fisher-Yates: the first nnz slots become the kept positions.
  std::vector<std::uint32_t> positions(total);
  std::iota(positions.begin(), positions.end(), 0u);
  for (std::size_t i = 0; i < nnz; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(positions[i], positions[pick(rng)]);
  }

  DenseMatrixI8 m = DenseMatrixI8::Zero(spec.rows, spec.cols);
  std::uniform_int_distribution<int> magnitude(1, 127);
  std::bernoulli_distribution negative(0.5);
  std::int8_t* data = m.data();
  for (std::size_t i = 0; i < nnz; ++i) {
    const int v = magnitude(rng);
    data[positions[i]] = static_cast<std::int8_t>(negative(rng) ? -v : v);
  }
  return m;
}

DenseMatrixI8 generate_dense(std::size_t rows, std::size_t cols,
                             std::uint64_t seed) {
  require_valid_dims(rows, cols);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> value(-128, 127);
  DenseMatrixI8 m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<std::int8_t>(value(rng));
  }
  return m;
}

std::vector<SparseRow> to_sparse_rows(const DenseMatrixI8& m) {
  std::vector<SparseRow> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    SparseRow& row = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0) {
        row.columns.push_back(static_cast<std::uint32_t>(c));
        row.values.push_back(m(r, c));
      }
    }
  }
  return rows;
}

DenseMatrixI8 densify(std::size_t rows, std::size_t cols,
                      const std::vector<SparseRow>& sparse) {
  require_valid_dims(rows, cols);
  if (sparse.size() != rows) {
    throw InvalidArgument("sparse row count does not match matrix rows");
  }
  DenseMatrixI8 m = DenseMatrixI8::Zero(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const SparseRow& row = sparse[r];
    if (row.columns.size() != row.values.size()) {
      throw InvalidArgument("sparse row columns/values length mismatch");
    }
    for (std::size_t k = 0; k < row.columns.size(); ++k) {
      const std::uint32_t c = row.columns[k];
      if (c >= cols || (k > 0 && c <= row.columns[k - 1])) {
        throw InvalidArgument("sparse row columns must be ascending and < cols");
      }
      m(static_cast<Eigen::Index>(r), c) = row.values[k];
    }
  }
  return m;
}

std::size_t count_nonzeros(const DenseMatrixI8& m) {
  return static_cast<std::size_t>((m.array() != 0).count());
}

}  // namespace dcsr
