#pragma once

#include <complex>
#include <vector>

#include "slowlight/dsp.hpp"
#include "slowlight/fitting.hpp"
#include "slowlight/transfer_matrix.hpp"

namespace slowlight {

// Complex-baseband record. The physical carrier never appears as samples;
// `carrier` is the absolute angular frequency that baseband dc maps to.
struct Waveform {
  double sample_rate = 0.0;  // samples/s
  double start_time = 0.0;   // s
  double carrier = 0.0;      // rad/s
  std::vector<std::complex<double>> samples;

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t i) const { return start_time + static_cast<double>(i) / sample_rate; }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  // sum |x|^2 dt
  double energy() const;
  void validate() const;
};

struct PulseSpec {
  double sigma = 0.0;             // s, Gaussian envelope width
  double center_frequency = 0.0;  // rad/s carrier
  double amplitude = 1.0;         // linear units

  // Pulse bandwidth in the 1/sigma cyclic-frequency convention (Hz):
  // sigma = 50 ns <-> 20 MHz.
  double bandwidth_hz() const { return 1.0 / sigma; }
};

// Gaussian envelope centered in the window. Requires duration >= 8 sigma.
Waveform synthesize_pulse(const PulseSpec& spec, double sample_rate, double duration);

// Frequency-domain application of the linear response: output =
// inverse(forward(pulse) * S21(carrier + offset)), zero-padded to avoid
// circular wrap. Spectrum sampled by linear interpolation on Re/Im; bins with
// non-negligible pulse content must lie inside the spectrum (CoverageError).
Waveform propagate(const Waveform& pulse, const ComplexSpectrum& spectrum);

struct HeterodyneSettings {
  double if_frequency_hz = 115e6;
  int filter_order = 5;
  double cutoff_hz = 115e6;
};

struct HeterodyneResult {
  Waveform waveform;
  // Constant low-pass group delay near dc; identical for signal and
  // reference, so differential delays are unaffected.
  double filter_group_delay = 0.0;  // s
};

// Emulated detection chain: upconvert to the intermediate frequency, digitize
// the real IF signal, digitally downconvert to dc, low-pass filter.
// Requires sample_rate > 4 * if_frequency.
HeterodyneResult heterodyne_chain(const Waveform& pulse, const HeterodyneSettings& settings = {});

struct PulseResult {
  double arrival_time = 0.0;  // s, fitted center of the measured pulse
  double sigma_fit = 0.0;     // s, fitted width of the measured pulse
  double amplitude_fit = 0.0;
  double delay = 0.0;       // s, center(measured) - center(reference)
  double efficiency = 0.0;  // energy(measured) / energy(reference)
  double delay_bandwidth_product = 0.0;  // delay * (1/sigma_ref), 1/sigma in Hz
};

// Gaussian fits to |envelope| of both waveforms; delay and energy ratio are
// differential so common-mode chain delays cancel.
PulseResult fit_arrival(const Waveform& measured, const Waveform& reference);

}  // namespace slowlight
