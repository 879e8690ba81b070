#pragma once

#include <complex>
#include <random>

#include "slowlight/types.hpp"
#include "slowlight/units.hpp"

#if defined(SLOWLIGHT_HAVE_BOOST_MP)
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

namespace slowlight::test {

// Averaged device rates used throughout the stock experiments.
inline TransmonQubit averaged_qubit() {
  TransmonQubit q;
  q.omega10 = ghz_to_angular(7.812);
  q.anharmonicity = mhz_to_angular(279.0);
  q.Gamma10 = mhz_to_angular(12.0);
  q.Gamma_nr = mhz_to_angular(0.9);  // gamma10 = 6.9 MHz
  q.gamma20 = mhz_to_angular(6.9);
  return q;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random passive qubit draw (Gamma_nr >= 0).
inline TransmonQubit random_passive_qubit(std::mt19937_64& rng) {
  TransmonQubit q;
  q.omega10 = ghz_to_angular(uniform(rng, 4.0, 8.0));
  q.anharmonicity = mhz_to_angular(uniform(rng, 150.0, 350.0));
  q.Gamma10 = mhz_to_angular(uniform(rng, 0.5, 25.0));
  q.Gamma_nr = mhz_to_angular(uniform(rng, 0.0, 5.0));
  q.gamma20 = mhz_to_angular(uniform(rng, 0.0, 20.0));
  return q;
}

#if defined(SLOWLIGHT_HAVE_BOOST_MP)
// Minimal complex arithmetic over 50-decimal-digit reals, used as the
// independent high-precision oracle. Kept free of std::complex on purpose.
using hp_real = boost::multiprecision::cpp_bin_float_50;

struct hp_complex {
  hp_real re{0}, im{0};
};

inline hp_complex hp_make(std::complex<double> z) { return {hp_real(z.real()), hp_real(z.imag())}; }
inline hp_complex operator+(const hp_complex& a, const hp_complex& b) {
  return {a.re + b.re, a.im + b.im};
}
inline hp_complex operator-(const hp_complex& a, const hp_complex& b) {
  return {a.re - b.re, a.im - b.im};
}
inline hp_complex operator*(const hp_complex& a, const hp_complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline hp_complex operator/(const hp_complex& a, const hp_complex& b) {
  const hp_real n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
inline hp_real hp_abs(const hp_complex& z) {
  using boost::multiprecision::sqrt;
  return sqrt(z.re * z.re + z.im * z.im);
}
inline hp_complex hp_sqrt(const hp_complex& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::cos;
  using boost::multiprecision::sin;
  using boost::multiprecision::sqrt;
  const hp_real mag = sqrt(hp_abs(z));
  const hp_real half_arg = atan2(z.im, z.re) / 2;
  return {mag * cos(half_arg), mag * sin(half_arg)};
}
inline hp_complex hp_log(const hp_complex& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::log;
  return {log(hp_abs(z)), atan2(z.im, z.re)};
}
// Principal arccos via -i log(z + i sqrt(1 - z^2)).
inline hp_complex hp_acos(const hp_complex& z) {
  const hp_complex one{hp_real(1), hp_real(0)};
  const hp_complex i{hp_real(0), hp_real(1)};
  const hp_complex root = hp_sqrt(one - z * z);
  const hp_complex inner = z + i * root;
  const hp_complex lg = hp_log(inner);
  return {lg.im, -lg.re};  // -i * lg
}
inline double hp_to_double(const hp_real& v) { return v.convert_to<double>(); }
#endif  // SLOWLIGHT_HAVE_BOOST_MP

}  // namespace slowlight::test
