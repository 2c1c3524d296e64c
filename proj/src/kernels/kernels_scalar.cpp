// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. Plain loops, no intrinsics; these define the expected
// results the vector variants are tested against.

#include "blr/kernels.hpp"

namespace blr::kernels {
namespace {

void and_scalar(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) out[i] = a[i] & b[i];
}

void or_scalar(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) out[i] = a[i] | b[i];
}

void not_scalar(const std::uint64_t* a, std::uint64_t* out, std::size_t nbits) {
  const std::size_t words = words_for(nbits);
  for (std::size_t i = 0; i < words; ++i) out[i] = ~a[i];
  if (const std::size_t tail = nbits % 64; tail != 0) out[words - 1] &= (std::uint64_t{1} << tail) - 1;
}

unsigned popcount_word(std::uint64_t x) {
  unsigned c = 0;
  while (x) {
    x &= x - 1;
    ++c;
  }
  return c;
}

std::uint64_t popcount_scalar(const std::uint64_t* a, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < words; ++i) c += popcount_word(a[i]);
  return c;
}

std::uint64_t popcount_and_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < words; ++i) c += popcount_word(a[i] & b[i]);
  return c;
}

double masked_sum_scalar(const double* v, const std::uint64_t* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if ((a[i / 64] >> (i % 64)) & 1U) s += v[i];
  return s;
}

double masked_sum_and_scalar(const double* v, const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (((a[i / 64] & b[i / 64]) >> (i % 64)) & 1U) s += v[i];
  return s;
}

void add_masked_scalar(double* dst, const std::uint64_t* a, double value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if ((a[i / 64] >> (i % 64)) & 1U) dst[i] += value;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      and_scalar,        or_scalar,          not_scalar,        popcount_scalar, popcount_and_scalar,
      masked_sum_scalar, masked_sum_and_scalar, add_masked_scalar, dot_scalar,
  };
  return table;
}

}  // namespace blr::kernels
