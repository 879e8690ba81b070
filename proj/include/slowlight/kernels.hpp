#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace slowlight::kernels {

// Grid-parallel inner loops of the scattering model. The scalar versions are
// the reference; the AVX2 versions are selected at runtime on capable x86-64
// hosts and must produce bit-identical results (same operation order, no FMA
// contraction). Everything here works on plain arrays so both variants share
// one layout.

struct QubitParams {
  double omega10;   // rad/s
  double gamma10;   // total 1->0 decoherence, rad/s
  double Gamma10;   // radiative rate, rad/s
  double gamma20;   // 2->0 decoherence, rad/s
  double delta_c;   // control detuning omega_c - omega21, rad/s
};

struct ChainParams {
  const QubitParams* qubits = nullptr;
  std::size_t n_qubits = 0;
  double spacing = 0.0;         // m
  double phase_velocity = 0.0;  // m/s
  double Omega_sq = 0.0;        // Omega_c^2; 0 disables the control term
  bool remove_line_phase = false;
};

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
// Backend picked at startup: AVX2 when the CPU supports it, overridable with
// SLOWLIGHT_KERNEL=scalar|avx2.
Backend active_backend();
// True when the avx2 variant is compiled in and the CPU can run it.
bool avx2_available();
// Test hook; throws on an unavailable backend.
void force_backend(Backend b);

// Single-qubit reflection amplitude over a grid.
void reflection_grid(const QubitParams& qubit, double Omega_sq, const double* omega,
                     std::size_t n, double* out_re, double* out_im);

// Full-chain S21 (and optionally S11) over a grid. s11_re/s11_im may be null.
void chain_s21_grid(const ChainParams& chain, const double* omega, std::size_t n,
                    double* s21_re, double* s21_im, double* s11_re, double* s11_im);

namespace detail {
// Reference implementations, always compiled; exposed for equivalence tests.
void reflection_grid_scalar(const QubitParams& qubit, double Omega_sq, const double* omega,
                            std::size_t n, double* out_re, double* out_im);
void chain_s21_grid_scalar(const ChainParams& chain, const double* omega, std::size_t n,
                           double* s21_re, double* s21_im, double* s11_re, double* s11_im);
#if defined(SLOWLIGHT_HAVE_AVX2)
void reflection_grid_avx2(const QubitParams& qubit, double Omega_sq, const double* omega,
                          std::size_t n, double* out_re, double* out_im);
void chain_s21_grid_avx2(const ChainParams& chain, const double* omega, std::size_t n,
                         double* s21_re, double* s21_im, double* s11_re, double* s11_im);
#endif
// Shared per-grid setup: phi, e^{i phi}, and the line-phase reference
// e^{-i(N-1)phi}; scalar so both backends consume identical values.
void segment_phases(const ChainParams& chain, const double* omega, std::size_t n,
                    std::vector<double>& e_re, std::vector<double>& e_im,
                    std::vector<double>& line_re, std::vector<double>& line_im);
}  // namespace detail

}  // namespace slowlight::kernels
