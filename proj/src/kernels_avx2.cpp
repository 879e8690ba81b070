#if defined(SLOWLIGHT_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>
#include <vector>

#include "slowlight/kernels.hpp"

// AVX2 variants processing four grid points per lane group. The operation
// order mirrors the scalar kernels exactly (separate mul/add, no FMA), so
// outputs are bit-identical; remainders fall back to the scalar kernel.

namespace slowlight::kernels::detail {

namespace {

using V = __m256d;

inline V vset(double x) { return _mm256_set1_pd(x); }
// Exact sign flip, matching scalar unary minus bit-for-bit (incl. zeros).
inline V vneg(V x) { return _mm256_xor_pd(x, vset(-0.0)); }

struct VC {
  V re, im;
};

inline VC vc_add(VC a, VC b) { return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)}; }

inline VC vc_mul(VC a, VC b) {
  const V re = _mm256_sub_pd(_mm256_mul_pd(a.re, b.re), _mm256_mul_pd(a.im, b.im));
  const V im = _mm256_add_pd(_mm256_mul_pd(a.re, b.im), _mm256_mul_pd(a.im, b.re));
  return {re, im};
}

inline VC vc_div(VC a, VC b) {
  const V n = _mm256_add_pd(_mm256_mul_pd(b.re, b.re), _mm256_mul_pd(b.im, b.im));
  const V re = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(a.re, b.re), _mm256_mul_pd(a.im, b.im)), n);
  const V im = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(a.im, b.re), _mm256_mul_pd(a.re, b.im)), n);
  return {re, im};
}

inline VC reflect_four(const QubitParams& q, double Omega_sq, V omega) {
  const V delta = _mm256_sub_pd(omega, vset(q.omega10));
  V d_re = vset(2.0 * q.gamma10);
  V d_im = _mm256_mul_pd(vset(-2.0), delta);
  V zero_mask = _mm256_setzero_pd();
  if (Omega_sq > 0.0) {
    const V ir = vset(2.0 * q.gamma20);
    const V ii = _mm256_mul_pd(vset(-2.0), _mm256_add_pd(delta, vset(q.delta_c)));
    const V n = _mm256_add_pd(_mm256_mul_pd(ir, ir), _mm256_mul_pd(ii, ii));
    zero_mask = _mm256_cmp_pd(n, _mm256_setzero_pd(), _CMP_EQ_OQ);
    d_re = _mm256_add_pd(d_re, _mm256_div_pd(_mm256_mul_pd(vset(Omega_sq), ir), n));
    d_im = _mm256_sub_pd(d_im, _mm256_div_pd(_mm256_mul_pd(vset(Omega_sq), ii), n));
  }
  const V n = _mm256_add_pd(_mm256_mul_pd(d_re, d_re), _mm256_mul_pd(d_im, d_im));
  V r_re = _mm256_div_pd(_mm256_mul_pd(vset(-q.Gamma10), d_re), n);
  V r_im = _mm256_div_pd(_mm256_mul_pd(vset(q.Gamma10), d_im), n);
  // Lanes where the control term diverged are exactly transparent.
  r_re = _mm256_andnot_pd(zero_mask, r_re);
  r_im = _mm256_andnot_pd(zero_mask, r_im);
  return {r_re, r_im};
}

}  // namespace

void reflection_grid_avx2(const QubitParams& qubit, double Omega_sq, const double* omega,
                          std::size_t n, double* out_re, double* out_im) {
  const std::size_t main = n - n % 4;
  for (std::size_t g = 0; g < main; g += 4) {
    const VC r = reflect_four(qubit, Omega_sq, _mm256_loadu_pd(omega + g));
    _mm256_storeu_pd(out_re + g, r.re);
    _mm256_storeu_pd(out_im + g, r.im);
  }
  if (main < n) {
    reflection_grid_scalar(qubit, Omega_sq, omega + main, n - main, out_re + main, out_im + main);
  }
}

void chain_s21_grid_avx2(const ChainParams& chain, const double* omega, std::size_t n,
                         double* s21_re, double* s21_im, double* s11_re, double* s11_im) {
  std::vector<double> e_re, e_im, line_re, line_im;
  segment_phases(chain, omega, n, e_re, e_im, line_re, line_im);

  const VC one = {vset(1.0), vset(0.0)};
  const std::size_t main = n - n % 4;
  for (std::size_t g = 0; g < main; g += 4) {
    const V w = _mm256_loadu_pd(omega + g);
    const VC e = {_mm256_loadu_pd(e_re.data() + g), _mm256_loadu_pd(e_im.data() + g)};
    const VC e_conj = {e.re, vneg(e.im)};

    VC m00 = one, m01 = {vset(0.0), vset(0.0)}, m10 = {vset(0.0), vset(0.0)}, m11 = one;
    for (std::size_t q = 0; q < chain.n_qubits; ++q) {
      const VC r = reflect_four(chain.qubits[q], chain.Omega_sq, w);
      const VC t = {_mm256_add_pd(vset(1.0), r.re), r.im};
      const VC inv_t = vc_div(one, t);
      const VC two_r_plus1 = {_mm256_add_pd(vset(1.0), _mm256_mul_pd(vset(2.0), r.re)),
                              _mm256_mul_pd(vset(2.0), r.im)};
      const VC a00 = vc_mul(two_r_plus1, inv_t);
      const VC a01 = vc_mul(r, inv_t);
      const VC a10 = {vneg(a01.re), vneg(a01.im)};
      const VC a11 = inv_t;
      if (q == 0) {
        m00 = a00;
        m01 = a01;
        m10 = a10;
        m11 = a11;
      } else {
        const VC p00 = vc_mul(e, m00), p01 = vc_mul(e, m01);
        const VC p10 = vc_mul(e_conj, m10), p11 = vc_mul(e_conj, m11);
        m00 = vc_add(vc_mul(a00, p00), vc_mul(a01, p10));
        m01 = vc_add(vc_mul(a00, p01), vc_mul(a01, p11));
        m10 = vc_add(vc_mul(a10, p00), vc_mul(a11, p10));
        m11 = vc_add(vc_mul(a10, p01), vc_mul(a11, p11));
      }
    }
    VC s21 = vc_div(one, m11);
    if (chain.remove_line_phase) {
      const VC line = {_mm256_loadu_pd(line_re.data() + g), _mm256_loadu_pd(line_im.data() + g)};
      s21 = vc_mul(s21, line);
    }
    _mm256_storeu_pd(s21_re + g, s21.re);
    _mm256_storeu_pd(s21_im + g, s21.im);
    if (s11_re != nullptr) {
      const VC neg_m10 = {vneg(m10.re), vneg(m10.im)};
      const VC s11 = vc_div(neg_m10, m11);
      _mm256_storeu_pd(s11_re + g, s11.re);
      _mm256_storeu_pd(s11_im + g, s11.im);
    }
  }
  if (main < n) {
    chain_s21_grid_scalar(chain, omega + main, n - main, s21_re + main, s21_im + main,
                          s11_re != nullptr ? s11_re + main : nullptr,
                          s11_im != nullptr ? s11_im + main : nullptr);
  }
}

}  // namespace slowlight::kernels::detail

#endif  // SLOWLIGHT_HAVE_AVX2
