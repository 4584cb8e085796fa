// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

// Little-endian byte writer/reader shared by the binary containers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcsr/error.hpp"

namespace dcsr::detail {

class ByteWriter {
 public:
  void magic(std::string_view tag) {
    for (char ch : tag) buf_.push_back(static_cast<std::uint8_t>(ch));
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v));
    u16(static_cast<std::uint16_t>(v >> 16));
  }
  void bytes(std::span<const std::uint8_t> src) {
    buf_.insert(buf_.end(), src.begin(), src.end());
  }
  void bytes(std::span<const std::int8_t> src) {
    for (std::int8_t v : src) u8(static_cast<std::uint8_t>(v));
  }
  // Zero fill up to the next multiple of `alignment`.
  void align(std::size_t alignment) {
    while (buf_.size() % alignment != 0) buf_.push_back(0);
  }
  std::size_t size() const { return buf_.size(); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void expect_magic(std::string_view tag) {
    auto got = take(tag.size(), "magic");
    if (std::memcmp(got.data(), tag.data(), tag.size()) != 0) {
      throw FormatError("bad magic, expected '" + std::string(tag) + "'");
    }
  }
  std::uint8_t u8() { return take(1, "u8")[0]; }
  std::uint16_t u16() {
    auto b = take(2, "u16");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4, "u32");
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (n > data_.size() - pos_) {
      throw FormatError(std::string("truncated stream while reading ") + what);
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  // Skips alignment fill, which must be zero.
  void align(std::size_t alignment) {
    while (pos_ % alignment != 0) {
      if (pos_ >= data_.size()) throw FormatError("truncated alignment fill");
      if (data_[pos_++] != 0) throw FormatError("non-zero alignment fill");
    }
  }
  void expect_end() const {
    if (pos_ != data_.size()) throw FormatError("trailing bytes after payload");
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace dcsr::detail
