#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace slowlight::dsp {

// Radix-2 FFT in the physics sign convention matching the exp(-i omega t)
// time dependence: forward (time -> frequency) sums x_n e^{+i omega t_n},
// inverse applies e^{-i omega t_n}/L. Sizes must be powers of two.

std::size_t next_pow2(std::size_t n);
bool is_pow2(std::size_t n);

void fft_forward(std::vector<std::complex<double>>& x);
void fft_inverse(std::vector<std::complex<double>>& x);

// Signed angular frequency offset of each FFT bin for the given sample rate.
std::vector<double> fft_angular_frequencies(std::size_t n, double sample_rate);

// Causal 5th-order-style Butterworth low-pass as cascaded bilinear-transform
// sections, applied independently to the real and imaginary streams.
class ButterworthLowpass {
 public:
  ButterworthLowpass(int order, double cutoff_hz, double sample_rate);

  void filter_inplace(std::vector<std::complex<double>>& x) const;
  // Frequency response at f_hz (|f| < sample_rate/2).
  std::complex<double> response(double f_hz) const;
  // Group delay at dc, seconds (finite difference of the response phase).
  double group_delay_dc() const;

  int order() const { return order_; }
  double cutoff_hz() const { return cutoff_hz_; }
  double sample_rate() const { return sample_rate_; }

 private:
  struct Section {  // b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2
    double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  };
  int order_;
  double cutoff_hz_;
  double sample_rate_;
  std::vector<Section> sections_;
};

}  // namespace slowlight::dsp
