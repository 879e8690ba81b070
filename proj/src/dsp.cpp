#include "slowlight/dsp.hpp"

#include <cmath>
#include <stdexcept>

#include "slowlight/units.hpp"

namespace slowlight::dsp {

namespace {

constexpr double kPi = kTwoPi / 2.0;

// In-place iterative radix-2 transform; sign = +1 applies e^{+i 2pi kn/L}.
void fft_radix2(std::vector<std::complex<double>>& x, int sign) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = static_cast<double>(sign) * kTwoPi / static_cast<double>(len);
    const std::complex<double> step{std::cos(angle), std::sin(angle)};
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_forward(std::vector<std::complex<double>>& x) { fft_radix2(x, +1); }

void fft_inverse(std::vector<std::complex<double>>& x) {
  fft_radix2(x, -1);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= scale;
}

std::vector<double> fft_angular_frequencies(std::size_t n, double sample_rate) {
  std::vector<double> w(n);
  const double base = kTwoPi * sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double idx = (k <= n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
    w[k] = base * idx;
  }
  return w;
}

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz, double sample_rate)
    : order_(order), cutoff_hz_(cutoff_hz), sample_rate_(sample_rate) {
  if (order < 1 || order > 12) throw std::invalid_argument("ButterworthLowpass: bad order");
  if (!(cutoff_hz > 0.0) || !(sample_rate > 0.0) || cutoff_hz >= 0.5 * sample_rate) {
    throw std::invalid_argument("ButterworthLowpass: cutoff must be below Nyquist");
  }

  // Bilinear transform with the cutoff prewarped so |H| = 1/sqrt(2) lands
  // exactly on cutoff_hz.
  const double k_bilinear = 2.0 * sample_rate;
  const double warped = k_bilinear * std::tan(kPi * cutoff_hz / sample_rate);

  // Analog prototype poles on the left unit semicircle, scaled by `warped`.
  const int pairs = order / 2;
  for (int m = 0; m < pairs; ++m) {
    const double theta = kPi * (2.0 * m + 1.0) / (2.0 * order) + kPi / 2.0;
    const double re = warped * std::cos(theta);
    const double im = warped * std::sin(theta);
    // H(s) = warped^2 / (s^2 + A s + B)
    const double a_coeff = -2.0 * re;
    const double b_coeff = re * re + im * im;
    const double a0 = k_bilinear * k_bilinear + a_coeff * k_bilinear + b_coeff;
    Section s;
    s.b0 = warped * warped / a0;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = (2.0 * b_coeff - 2.0 * k_bilinear * k_bilinear) / a0;
    s.a2 = (k_bilinear * k_bilinear - a_coeff * k_bilinear + b_coeff) / a0;
    sections_.push_back(s);
  }
  if (order % 2 == 1) {
    // First-order section, pole at -warped.
    const double a0 = k_bilinear + warped;
    Section s;
    s.b0 = warped / a0;
    s.b1 = s.b0;
    s.b2 = 0.0;
    s.a1 = (warped - k_bilinear) / a0;
    s.a2 = 0.0;
    sections_.push_back(s);
  }
}

void ButterworthLowpass::filter_inplace(std::vector<std::complex<double>>& x) const {
  // Direct form II transposed per section, complex samples through real
  // coefficients; causal single pass, matching a real-time chain.
  for (const Section& s : sections_) {
    std::complex<double> z1{0.0, 0.0}, z2{0.0, 0.0};
    for (auto& v : x) {
      const std::complex<double> in = v;
      const std::complex<double> out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

std::complex<double> ButterworthLowpass::response(double f_hz) const {
  const double w = kTwoPi * f_hz / sample_rate_;
  const std::complex<double> z_inv{std::cos(w), -std::sin(w)};
  std::complex<double> h{1.0, 0.0};
  for (const Section& s : sections_) {
    h *= (s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv) /
         (1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv);
  }
  return h;
}

double ButterworthLowpass::group_delay_dc() const {
  const double df = sample_rate_ * 1e-7;
  const double phase_hi = std::arg(response(df));
  const double phase_lo = std::arg(response(-df));
  return -(phase_hi - phase_lo) / (2.0 * kTwoPi * df);
}

}  // namespace slowlight::dsp
