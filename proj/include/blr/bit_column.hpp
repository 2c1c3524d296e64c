// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blr/kernels.hpp"

namespace blr {

/// One binary variable over n observations, packed 64 per word.
/// Bits at positions >= size() are always zero.
class BitColumn {
 public:
  BitColumn() = default;
  explicit BitColumn(std::size_t n) : n_(n), words_(kernels::words_for(n), 0) {}

  static BitColumn ones(std::size_t n);
  static BitColumn from_bits(std::span<const std::uint8_t> bits);

  std::size_t size() const { return n_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (v)
      words_[i / 64] |= bit;
    else
      words_[i / 64] &= ~bit;
  }

  std::size_t count() const { return kernels::popcount(words_); }

  BitColumn operator&(const BitColumn& o) const;
  BitColumn operator|(const BitColumn& o) const;
  BitColumn operator~() const;

  bool operator==(const BitColumn& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace blr
