// SPDX-License-Identifier: Apache-2.0
#include "blr/bit_column.hpp"

#include <stdexcept>

namespace blr {

BitColumn BitColumn::ones(std::size_t n) {
  BitColumn zero(n);
  return ~zero;
}

BitColumn BitColumn::from_bits(std::span<const std::uint8_t> bits) {
  BitColumn c(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) c.set(i, true);
  return c;
}

BitColumn BitColumn::operator&(const BitColumn& o) const {
  if (o.n_ != n_) throw std::invalid_argument("BitColumn length mismatch");
  BitColumn r(n_);
  kernels::bit_and(words_, o.words_, r.words_);
  return r;
}

BitColumn BitColumn::operator|(const BitColumn& o) const {
  if (o.n_ != n_) throw std::invalid_argument("BitColumn length mismatch");
  BitColumn r(n_);
  kernels::bit_or(words_, o.words_, r.words_);
  return r;
}

BitColumn BitColumn::operator~() const {
  BitColumn r(n_);
  if (n_ > 0) kernels::bit_not(words_, r.words_, n_);
  return r;
}

}  // namespace blr
