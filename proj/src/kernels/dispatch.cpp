// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "blr/kernels.hpp"

namespace blr::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(BLR_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

// BLR_KERNELS=scalar forces the reference path.
Backend initial_backend() {
  if (const char* env = std::getenv("BLR_KERNELS"); env && std::string_view(env) == "scalar") return Backend::Scalar;
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

const KernelTable& table_for(Backend b) {
#if defined(BLR_HAVE_AVX2_KERNELS)
  if (b == Backend::Avx2) return avx2_table();
#endif
  (void)b;
  return scalar_table();
}

struct State {
  std::atomic<Backend> backend{initial_backend()};
  std::atomic<const KernelTable*> table{&table_for(backend.load())};
};

State& state() {
  static State s;
  return s;
}

}  // namespace

bool backend_supported(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

Backend active_backend() { return state().backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b)) throw std::invalid_argument(std::string("kernel backend not supported: ") + backend_name(b));
  state().backend.store(b);
  state().table.store(&table_for(b));
}

const KernelTable& active() { return *state().table.load(std::memory_order_relaxed); }

}  // namespace blr::kernels
