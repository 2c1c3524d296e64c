// SPDX-License-Identifier: Apache-2.0
#pragma once

// Inner-loop kernels over packed bit columns and dense double vectors.
//
// A bit column stores one bit per observation, 64 observations per word,
// least-significant bit first. Bits past the logical length must be zero;
// every kernel that produces a column preserves that.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant. The active backend is chosen once at startup from the CPU
// features and can be overridden (tests run both and compare).

#include <cstddef>
#include <cstdint>
#include <span>

namespace blr::kernels {

enum class Backend { Scalar, Avx2 };

/// Table of kernel entry points for one backend.
struct KernelTable {
  void (*bit_and)(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words);
  void (*bit_or)(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words);
  // out = ~a, with bits at positions >= nbits cleared.
  void (*bit_not)(const std::uint64_t* a, std::uint64_t* out, std::size_t nbits);
  std::uint64_t (*popcount)(const std::uint64_t* a, std::size_t words);
  std::uint64_t (*popcount_and)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  // sum_i v[i] * bit_i(a), i < n
  double (*masked_sum)(const double* v, const std::uint64_t* a, std::size_t n);
  // sum_i v[i] * bit_i(a) * bit_i(b), i < n
  double (*masked_sum_and)(const double* v, const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
  // dst[i] += value * bit_i(a), i < n
  void (*add_masked)(double* dst, const std::uint64_t* a, double value, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(BLR_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

bool backend_supported(Backend b);
const char* backend_name(Backend b);

Backend active_backend();
/// Throws std::invalid_argument if the backend is not supported on this CPU.
void set_backend(Backend b);
const KernelTable& active();

inline std::size_t words_for(std::size_t nbits) { return (nbits + 63) / 64; }

// Span convenience wrappers over the active backend.

inline void bit_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                    std::span<std::uint64_t> out) {
  active().bit_and(a.data(), b.data(), out.data(), out.size());
}
inline void bit_or(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                   std::span<std::uint64_t> out) {
  active().bit_or(a.data(), b.data(), out.data(), out.size());
}
inline void bit_not(std::span<const std::uint64_t> a, std::span<std::uint64_t> out, std::size_t nbits) {
  active().bit_not(a.data(), out.data(), nbits);
}
inline std::uint64_t popcount(std::span<const std::uint64_t> a) {
  return active().popcount(a.data(), a.size());
}
inline std::uint64_t popcount_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return active().popcount_and(a.data(), b.data(), a.size());
}
inline double masked_sum(std::span<const double> v, std::span<const std::uint64_t> a) {
  return active().masked_sum(v.data(), a.data(), v.size());
}
inline double masked_sum_and(std::span<const double> v, std::span<const std::uint64_t> a,
                             std::span<const std::uint64_t> b) {
  return active().masked_sum_and(v.data(), a.data(), b.data(), v.size());
}
inline void add_masked(std::span<double> dst, std::span<const std::uint64_t> a, double value) {
  active().add_masked(dst.data(), a.data(), value, dst.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

}  // namespace blr::kernels
