#include "slowlight/pulse_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

// Fraction of the spectral peak below which a bin may fall outside the
// supplied spectrum (edge-clamped) without raising a coverage error.
constexpr double kNegligibleSpectralContent = 1e-8;

complexd interp_spectrum(const ComplexSpectrum& s, double omega) {
  const auto& w = s.grid.omegas();
  if (omega <= w.front()) return s.values.front();
  if (omega >= w.back()) return s.values.back();
  const auto it = std::upper_bound(w.begin(), w.end(), omega);
  const std::size_t hi = static_cast<std::size_t>(it - w.begin());
  const std::size_t lo = hi - 1;
  const double f = (omega - w[lo]) / (w[hi] - w[lo]);
  // Linear on Re and Im separately; interpolating magnitude/phase would
  // reintroduce unwrap artifacts here.
  return s.values[lo] + f * (s.values[hi] - s.values[lo]);
}

struct GaussianFit {
  double amplitude;
  double center;
  double sigma;
  FitReport report;
};

GaussianFit fit_gaussian_envelope(const Waveform& wave) {
  const std::size_t n = wave.size();
  std::vector<double> env(n);
  double peak = 0.0;
  std::size_t peak_idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    env[i] = std::abs(wave.samples[i]);
    if (env[i] > peak) {
      peak = env[i];
      peak_idx = i;
    }
  }
  if (peak <= 0.0) {
    throw FitFailureError("fit_arrival: zero envelope", FitReport{});
  }

  // Fit the contiguous main lobe above a tenth of the peak: arrival timing
  // should not be pulled by leakage pedestals or mixer-image ripple in the
  // tails.
  std::size_t lo = peak_idx;
  while (lo > 0 && env[lo - 1] >= 0.1 * peak) --lo;
  std::size_t hi = peak_idx;
  while (hi + 1 < n && env[hi + 1] >= 0.1 * peak) ++hi;
  const std::size_t m = hi - lo + 1;
  if (m < 5) {
    throw FitFailureError("fit_arrival: pulse not resolved by the sampling", FitReport{});
  }

  // Moment-based width seed over the lobe.
  double sw = 0.0, swt = 0.0, swt2 = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double t = wave.time_at(i);
    const double w = env[i] * env[i];
    sw += w;
    swt += w * t;
    swt2 += w * t * t;
  }
  const double mean = swt / sw;
  const double var = std::max(swt2 / sw - mean * mean, 1.0 / (wave.sample_rate * wave.sample_rate));
  const double sigma0 = std::max(std::sqrt(2.0 * var), 2.0 / wave.sample_rate);

  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    const double a = x[0];
    const double t0 = x[1];
    const double s = std::abs(x[2]);
    for (std::size_t i = 0; i < m; ++i) {
      const double dt = wave.time_at(lo + i) - t0;
      r[i] = a * std::exp(-dt * dt / (2.0 * s * s)) - env[lo + i];
    }
  };
  FitReport report =
      fit_least_squares_noexcept(residual, m, {peak, wave.time_at(peak_idx), sigma0});
  if (!report.converged) {
    throw FitFailureError("fit_arrival: Gaussian envelope fit did not converge", report);
  }
  return {report.parameters[0], report.parameters[1], std::abs(report.parameters[2]),
          std::move(report)};
}

}  // namespace

double Waveform::energy() const {
  double e = 0.0;
  for (const auto& v : samples) e += std::norm(v);
  return e / sample_rate;
}

void Waveform::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw InvalidParameterError("Waveform: bad sample rate");
  }
  if (samples.size() < 2) throw InvalidParameterError("Waveform: need at least 2 samples");
  if (!std::isfinite(start_time) || !std::isfinite(carrier)) {
    throw InvalidParameterError("Waveform: non-finite metadata");
  }
}

Waveform synthesize_pulse(const PulseSpec& spec, double sample_rate, double duration) {
  if (!(spec.sigma > 0.0)) throw InvalidParameterError("synthesize_pulse: sigma must be positive");
  if (!(sample_rate > 0.0)) throw InvalidParameterError("synthesize_pulse: bad sample rate");
  if (duration < 8.0 * spec.sigma) {
    throw InvalidParameterError(
        "synthesize_pulse: window shorter than 8 sigma truncates the pulse");
  }
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  if (n < 2) throw InvalidParameterError("synthesize_pulse: window too short for the sample rate");

  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.start_time = 0.0;
  wave.carrier = spec.center_frequency;
  wave.samples.resize(n);
  const double t_center = 0.5 * duration;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) / sample_rate - t_center;
    wave.samples[i] = spec.amplitude * std::exp(-dt * dt / (2.0 * spec.sigma * spec.sigma));
  }
  return wave;
}

Waveform propagate(const Waveform& pulse, const ComplexSpectrum& spectrum) {
  pulse.validate();
  const std::size_t padded = dsp::next_pow2(2 * pulse.size());

  std::vector<std::complex<double>> freq(padded, {0.0, 0.0});
  std::copy(pulse.samples.begin(), pulse.samples.end(), freq.begin());
  dsp::fft_forward(freq);

  double peak_mag = 0.0;
  for (const auto& v : freq) peak_mag = std::max(peak_mag, std::abs(v));

  const std::vector<double> offsets = dsp::fft_angular_frequencies(padded, pulse.sample_rate);
  for (std::size_t k = 0; k < padded; ++k) {
    const double omega = pulse.carrier + offsets[k];
    const bool inside = omega >= spectrum.grid.front() && omega <= spectrum.grid.back();
    if (!inside && std::abs(freq[k]) > kNegligibleSpectralContent * peak_mag) {
      throw CoverageError("propagate: pulse bandwidth exceeds the spectrum coverage");
    }
    freq[k] *= interp_spectrum(spectrum, omega);
  }
  dsp::fft_inverse(freq);

  Waveform out;
  out.sample_rate = pulse.sample_rate;
  out.start_time = pulse.start_time;
  out.carrier = pulse.carrier;
  out.samples = std::move(freq);
  return out;
}

HeterodyneResult heterodyne_chain(const Waveform& pulse, const HeterodyneSettings& settings) {
  pulse.validate();
  if (!(settings.if_frequency_hz > 0.0)) {
    throw InvalidParameterError("heterodyne_chain: bad intermediate frequency");
  }
  if (pulse.sample_rate <= 4.0 * settings.if_frequency_hz) {
    throw InvalidParameterError(
        "heterodyne_chain: sample rate must exceed 4x the intermediate frequency");
  }

  const double w_if = kTwoPi * settings.if_frequency_hz;
  std::vector<std::complex<double>> samples(pulse.size());
  for (std::size_t i = 0; i < pulse.size(); ++i) {
    const double t = pulse.time_at(i);
    // Single-sideband upconversion to the IF, digitized as a real voltage.
    const std::complex<double> at_if =
        pulse.samples[i] * std::complex<double>{std::cos(w_if * t), -std::sin(w_if * t)};
    const double digitized = at_if.real();
    // Digital downconversion back to dc; the x2 restores the SSB amplitude
    // and the image at 2 f_IF is left for the low-pass.
    samples[i] = 2.0 * digitized *
                 std::complex<double>{std::cos(w_if * t), std::sin(w_if * t)};
  }

  const dsp::ButterworthLowpass lowpass(settings.filter_order, settings.cutoff_hz,
                                        pulse.sample_rate);
  lowpass.filter_inplace(samples);

  HeterodyneResult result;
  result.waveform = pulse;
  result.waveform.samples = std::move(samples);
  result.filter_group_delay = lowpass.group_delay_dc();
  return result;
}

PulseResult fit_arrival(const Waveform& measured, const Waveform& reference) {
  measured.validate();
  reference.validate();

  const GaussianFit fit_m = fit_gaussian_envelope(measured);
  const GaussianFit fit_r = fit_gaussian_envelope(reference);

  PulseResult result;
  result.arrival_time = fit_m.center;
  result.sigma_fit = fit_m.sigma;
  result.amplitude_fit = fit_m.amplitude;
  result.delay = fit_m.center - fit_r.center;
  result.efficiency = measured.energy() / reference.energy();
  // 1/sigma cyclic-frequency bandwidth convention, reference width.
  result.delay_bandwidth_product = result.delay / fit_r.sigma;
  return result;
}

}  // namespace slowlight
