// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma
// -mpopcnt and must only be entered after a runtime CPU check.

#include <immintrin.h>

#include "blr/kernels.hpp"

namespace blr::kernels {
namespace {

// Lane masks for the 16 patterns of 4 consecutive bits.
struct NibbleMasks {
  alignas(32) std::int64_t lanes[16][4];
  NibbleMasks() {
    for (int p = 0; p < 16; ++p)
      for (int k = 0; k < 4; ++k) lanes[p][k] = ((p >> k) & 1) ? -1 : 0;
  }
};
const NibbleMasks kNibble;

inline __m256d nibble_mask(std::uint64_t word, int j) {
  const auto* p = kNibble.lanes[(word >> (4 * j)) & 0xF];
  return _mm256_castsi256_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(p)));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void and_avx2(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(va, vb));
  }
  for (; i < words; ++i) out[i] = a[i] & b[i];
}

void or_avx2(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out, std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_or_si256(va, vb));
  }
  for (; i < words; ++i) out[i] = a[i] | b[i];
}

void not_avx2(const std::uint64_t* a, std::uint64_t* out, std::size_t nbits) {
  const std::size_t words = words_for(nbits);
  const __m256i ones = _mm256_set1_epi64x(-1);
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_xor_si256(va, ones));
  }
  for (; i < words; ++i) out[i] = ~a[i];
  if (const std::size_t tail = nbits % 64; tail != 0) out[words - 1] &= (std::uint64_t{1} << tail) - 1;
}

// Nibble-lookup population count over 256-bit lanes.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,  //
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  __m256i lo = _mm256_and_si256(v, low);
  __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

inline std::uint64_t hsum_epi64(__m256i v) {
  return static_cast<std::uint64_t>(_mm256_extract_epi64(v, 0)) + static_cast<std::uint64_t>(_mm256_extract_epi64(v, 1)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(v, 2)) + static_cast<std::uint64_t>(_mm256_extract_epi64(v, 3));
}

std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()));
  }
  std::uint64_t c = hsum_epi64(acc);
  for (; i < words; ++i) c += static_cast<std::uint64_t>(_mm_popcnt_u64(a[i]));
  return c;
}

std::uint64_t popcount_and_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i v = _mm256_and_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)),
                                 _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()));
  }
  std::uint64_t c = hsum_epi64(acc);
  for (; i < words; ++i) c += static_cast<std::uint64_t>(_mm_popcnt_u64(a[i] & b[i]));
  return c;
}

// Sum of v over the set bits of one full 64-row word.
inline __m256d masked_word(const double* v, std::uint64_t word, __m256d acc) {
  for (int j = 0; j < 16; ++j) acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(v + 4 * j), nibble_mask(word, j)));
  return acc;
}

double masked_tail(const double* v, std::uint64_t word, std::size_t count) {
  double s = 0.0;
  for (std::size_t k = 0; k < count; ++k)
    if ((word >> k) & 1U) s += v[k];
  return s;
}

double masked_sum_avx2(const double* v, const std::uint64_t* a, std::size_t n) {
  const std::size_t full = n / 64;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t w = 0; w < full; ++w)
    if (a[w]) acc = masked_word(v + 64 * w, a[w], acc);
  double s = hsum(acc);
  if (n % 64) s += masked_tail(v + 64 * full, a[full], n % 64);
  return s;
}

double masked_sum_and_avx2(const double* v, const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  const std::size_t full = n / 64;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t w = 0; w < full; ++w)
    if (const std::uint64_t word = a[w] & b[w]) acc = masked_word(v + 64 * w, word, acc);
  double s = hsum(acc);
  if (n % 64) s += masked_tail(v + 64 * full, a[full] & b[full], n % 64);
  return s;
}

void add_masked_avx2(double* dst, const std::uint64_t* a, double value, std::size_t n) {
  const std::size_t full = n / 64;
  const __m256d vv = _mm256_set1_pd(value);
  for (std::size_t w = 0; w < full; ++w) {
    const std::uint64_t word = a[w];
    if (!word) continue;
    double* d = dst + 64 * w;
    for (int j = 0; j < 16; ++j)
      _mm256_storeu_pd(d + 4 * j, _mm256_add_pd(_mm256_loadu_pd(d + 4 * j), _mm256_and_pd(vv, nibble_mask(word, j))));
  }
  if (const std::size_t tail = n % 64) {
    double* d = dst + 64 * full;
    for (std::size_t k = 0; k < tail; ++k)
      if ((a[full] >> k) & 1U) d[k] += value;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      and_avx2,        or_avx2,            not_avx2,        popcount_avx2, popcount_and_avx2,
      masked_sum_avx2, masked_sum_and_avx2, add_masked_avx2, dot_avx2,
  };
  return table;
}

}  // namespace blr::kernels
