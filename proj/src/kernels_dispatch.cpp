#include "slowlight/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace slowlight::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SLOWLIGHT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend pick_default() {
  if (const char* env = std::getenv("SLOWLIGHT_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
    return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{pick_default()};
  return slot;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

bool avx2_available() { return cpu_has_avx2(); }

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2()) {
    throw std::runtime_error("kernels: avx2 backend not available on this host");
  }
  backend_slot().store(b, std::memory_order_relaxed);
}

void reflection_grid(const QubitParams& qubit, double Omega_sq, const double* omega,
                     std::size_t n, double* out_re, double* out_im) {
#if defined(SLOWLIGHT_HAVE_AVX2)
  if (active_backend() == Backend::avx2) {
    detail::reflection_grid_avx2(qubit, Omega_sq, omega, n, out_re, out_im);
    return;
  }
#endif
  detail::reflection_grid_scalar(qubit, Omega_sq, omega, n, out_re, out_im);
}

void chain_s21_grid(const ChainParams& chain, const double* omega, std::size_t n,
                    double* s21_re, double* s21_im, double* s11_re, double* s11_im) {
#if defined(SLOWLIGHT_HAVE_AVX2)
  if (active_backend() == Backend::avx2) {
    detail::chain_s21_grid_avx2(chain, omega, n, s21_re, s21_im, s11_re, s11_im);
    return;
  }
#endif
  detail::chain_s21_grid_scalar(chain, omega, n, s21_re, s21_im, s11_re, s11_im);
}

}  // namespace slowlight::kernels
