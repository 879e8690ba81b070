#include <cmath>
#include <cstddef>
#include <vector>

#include "slowlight/kernels.hpp"

// Reference kernels. Complex arithmetic is spelled out on separate re/im
// lanes with plain mul/add (no std::complex, no FMA) so the vector variants
// can reproduce results bit-for-bit.

namespace slowlight::kernels::detail {

namespace {

struct C {
  double re, im;
};

inline C cadd(C a, C b) { return {a.re + b.re, a.im + b.im}; }
inline C cmul(C a, C b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline C cdiv(C a, C b) {
  const double n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

// Dressed-state reflection at a single probe frequency.
inline C reflect_one(const QubitParams& q, double Omega_sq, double omega) {
  const double delta = omega - q.omega10;
  double d_re = 2.0 * q.gamma10;
  double d_im = -2.0 * delta;
  if (Omega_sq > 0.0) {
    const double ir = 2.0 * q.gamma20;
    const double ii = -2.0 * (delta + q.delta_c);
    const double n = ir * ir + ii * ii;
    if (n == 0.0) {
      // Diverging control term: transparent limit.
      return {0.0, 0.0};
    }
    d_re += Omega_sq * ir / n;
    d_im += -(Omega_sq * ii / n);
  }
  const double n = d_re * d_re + d_im * d_im;
  return {-q.Gamma10 * d_re / n, q.Gamma10 * d_im / n};
}

}  // namespace

void reflection_grid_scalar(const QubitParams& qubit, double Omega_sq, const double* omega,
                            std::size_t n, double* out_re, double* out_im) {
  for (std::size_t g = 0; g < n; ++g) {
    const C r = reflect_one(qubit, Omega_sq, omega[g]);
    out_re[g] = r.re;
    out_im[g] = r.im;
  }
}

void segment_phases(const ChainParams& chain, const double* omega, std::size_t n,
                    std::vector<double>& e_re, std::vector<double>& e_im,
                    std::vector<double>& line_re, std::vector<double>& line_im) {
  e_re.resize(n);
  e_im.resize(n);
  line_re.assign(n, 1.0);
  line_im.assign(n, 0.0);
  const double inv_v = chain.spacing / chain.phase_velocity;
  for (std::size_t g = 0; g < n; ++g) {
    const double phi = omega[g] * inv_v;
    e_re[g] = std::cos(phi);
    e_im[g] = std::sin(phi);
    if (chain.remove_line_phase && chain.n_qubits > 1) {
      const double total = static_cast<double>(chain.n_qubits - 1) * phi;
      line_re[g] = std::cos(total);
      line_im[g] = -std::sin(total);
    }
  }
}

void chain_s21_grid_scalar(const ChainParams& chain, const double* omega, std::size_t n,
                           double* s21_re, double* s21_im, double* s11_re, double* s11_im) {
  std::vector<double> e_re, e_im, line_re, line_im;
  segment_phases(chain, omega, n, e_re, e_im, line_re, line_im);

  for (std::size_t g = 0; g < n; ++g) {
    const C e = {e_re[g], e_im[g]};
    const C e_conj = {e_re[g], -e_im[g]};
    // Composite accumulates right-to-left: M = T_q ( T_phi M ).
    C m00{1, 0}, m01{0, 0}, m10{0, 0}, m11{1, 0};
    for (std::size_t q = 0; q < chain.n_qubits; ++q) {
      const C r = reflect_one(chain.qubits[q], chain.Omega_sq, omega[g]);
      const C t = {1.0 + r.re, r.im};
      const C inv_t = cdiv({1.0, 0.0}, t);
      // T entries: a00 = (1+2r)/t, a01 = r/t, a10 = -a01, a11 = 1/t.
      const C a00 = cmul({1.0 + 2.0 * r.re, 2.0 * r.im}, inv_t);
      const C a01 = cmul(r, inv_t);
      const C a10 = {-a01.re, -a01.im};
      const C a11 = inv_t;
      if (q == 0) {
        m00 = a00;
        m01 = a01;
        m10 = a10;
        m11 = a11;
      } else {
        // One segment then the qubit: rows of M scale by e^{+-i phi} first.
        const C p00 = cmul(e, m00), p01 = cmul(e, m01);
        const C p10 = cmul(e_conj, m10), p11 = cmul(e_conj, m11);
        m00 = cadd(cmul(a00, p00), cmul(a01, p10));
        m01 = cadd(cmul(a00, p01), cmul(a01, p11));
        m10 = cadd(cmul(a10, p00), cmul(a11, p10));
        m11 = cadd(cmul(a10, p01), cmul(a11, p11));
      }
    }
    C s21 = cdiv({1.0, 0.0}, m11);
    if (chain.remove_line_phase) s21 = cmul(s21, {line_re[g], line_im[g]});
    s21_re[g] = s21.re;
    s21_im[g] = s21.im;
    if (s11_re != nullptr) {
      const C s11 = cdiv({-m10.re, -m10.im}, m11);
      s11_re[g] = s11.re;
      s11_im[g] = s11.im;
    }
  }
}

}  // namespace slowlight::kernels::detail
