// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>

namespace dcsr {

// Byte accounting of one encoded matrix. Headers and alignment fill are not
// part of the core footprint.
struct FootprintBreakdown {
  std::string format;
  std::size_t dense_bytes = 0;    // rows * cols at 8 bits
  std::size_t values_bytes = 0;   // stored non-zero values
  std::size_t padding_bytes = 0;  // inserted zero values
  std::size_t metadata_bytes = 0;
  std::size_t total_bytes = 0;
  // Named pieces of metadata_bytes, e.g. "row_ptr" or "masks".
  std::map<std::string, std::size_t> metadata_parts;

  double compression_ratio() const {
    return total_bytes == 0 ? 0.0
                            : static_cast<double>(dense_bytes) /
                                  static_cast<double>(total_bytes);
  }
  // Padding elements per stored non-zero.
  double padding_fraction() const {
    return values_bytes == 0 ? 0.0
                             : static_cast<double>(padding_bytes) /
                                   static_cast<double>(values_bytes);
  }
};

// Fills metadata_bytes and total_bytes from the parts and value counts.
void finalize_footprint(FootprintBreakdown& f);

}  // namespace dcsr
