// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dcsr/matrix.hpp"

namespace dcsr {

// Matrix Market, `%%MatrixMarket matrix coordinate integer general`, 1-based
// `row col value` triples. Only non-zeros are written.
DenseMatrixI8 read_matrix_market(std::istream& in);
void write_matrix_market(const DenseMatrixI8& m, std::ostream& out);
DenseMatrixI8 load_matrix_market(const std::filesystem::path& path);
void store_matrix_market(const DenseMatrixI8& m,
                         const std::filesystem::path& path);

// Dense binary: "DMI8", u32 rows, u32 cols (little-endian), then rows*cols
// signed bytes in row-major order.
std::vector<std::uint8_t> encode_dense_binary(const DenseMatrixI8& m);
DenseMatrixI8 decode_dense_binary(std::span<const std::uint8_t> bytes);
DenseMatrixI8 load_dense_binary(const std::filesystem::path& path);
void store_dense_binary(const DenseMatrixI8& m,
                        const std::filesystem::path& path);

// Whole-file helpers shared by the codecs and the CLI.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace dcsr
