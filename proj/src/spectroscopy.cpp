#include "slowlight/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

constexpr double kPi = kTwoPi / 2.0;

double lorentzian(double omega, double center, double width) {
  const double w2 = width * width;
  return w2 / ((omega - center) * (omega - center) + w2);
}

std::vector<std::size_t> local_minima(std::span<const double> y) {
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) minima.push_back(i);
  }
  return minima;
}

double aic_score(double rss, std::size_t n, std::size_t p) {
  const double floor_rss = std::max(rss, 1e-300);
  return static_cast<double>(n) * std::log(floor_rss / static_cast<double>(n)) +
         2.0 * static_cast<double>(p);
}

}  // namespace

std::vector<double> unwrap_phase(const ComplexSpectrum& spectrum) {
  std::vector<double> phase(spectrum.size());
  if (spectrum.size() == 0) return phase;
  phase[0] = std::arg(spectrum.values[0]);
  for (std::size_t i = 1; i < spectrum.size(); ++i) {
    const double raw = std::arg(spectrum.values[i]);
    double delta = raw - std::arg(spectrum.values[i - 1]);
    while (delta > kPi) delta -= kTwoPi;
    while (delta <= -kPi) delta += kTwoPi;
    if (std::abs(delta) >= kPi * (1.0 - 1e-9)) {
      throw GridError("unwrap_phase: phase step reaches pi between samples; refine the grid");
    }
    phase[i] = phase[i - 1] + delta;
  }
  return phase;
}

DelayEstimate phase_gradient_delay(const ComplexSpectrum& spectrum, std::size_t n_qubits,
                                   double spacing, double omega_eval,
                                   double averaging_bandwidth) {
  if (spectrum.size() < 3) throw GridError("phase_gradient_delay: need at least 3 points");
  if (!std::isfinite(omega_eval) || omega_eval < spectrum.grid.front() ||
      omega_eval > spectrum.grid.back()) {
    throw InvalidParameterError("phase_gradient_delay: omega_eval outside the spectrum");
  }
  if (averaging_bandwidth < 0.0) {
    throw InvalidParameterError("phase_gradient_delay: negative averaging bandwidth");
  }

  const std::vector<double> phase = unwrap_phase(spectrum);
  double slope = 0.0;
  bool have_slope = false;

  if (averaging_bandwidth > 0.0) {
    // Least-squares line through the points within +-B/2 of omega_eval.
    const double half = 0.5 * averaging_bandwidth;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      const double x = spectrum.grid[i] - omega_eval;
      if (std::abs(x) > half) continue;
      sx += x;
      sy += phase[i];
      sxx += x * x;
      sxy += x * phase[i];
      ++count;
    }
    if (count >= 2) {
      const double det = static_cast<double>(count) * sxx - sx * sx;
      if (det != 0.0) {
        slope = (static_cast<double>(count) * sxy - sx * sy) / det;
        have_slope = true;
      }
    }
  }
  if (!have_slope) {
    const std::size_t i = spectrum.grid.nearest_index(omega_eval);
    if (i == 0 || i + 1 >= spectrum.size()) {
      throw GridError("phase_gradient_delay: omega_eval needs an interior stencil");
    }
    slope = (phase[i + 1] - phase[i - 1]) / (spectrum.grid[i + 1] - spectrum.grid[i - 1]);
  }

  DelayEstimate estimate;
  estimate.regime = DelayRegime::numeric;
  estimate.tau = slope;
  estimate.group_index =
      kVacuumLightSpeed * slope / (static_cast<double>(n_qubits - 1) * spacing);
  return estimate;
}

TransparencyWindow window_metrics(const ComplexSpectrum& spectrum, double threshold_fraction,
                                  double required_bandwidth) {
  if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0) {
    throw InvalidParameterError("window_metrics: threshold fraction must be in (0, 1)");
  }
  std::vector<double> mag(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) mag[i] = std::abs(spectrum.values[i]);

  const std::vector<std::size_t> minima = local_minima(mag);
  if (minima.size() < 2) {
    throw StructureNotFoundError("window_metrics: no dip pair around a transparency window");
  }

  // Highest interior maximum between the outermost dips.
  std::size_t peak = 0;
  double peak_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = minima.front() + 1; i < minima.back(); ++i) {
    if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > peak_value) {
      peak = i;
      peak_value = mag[i];
    }
  }
  if (peak == 0) {
    throw StructureNotFoundError("window_metrics: no interior transmission maximum");
  }

  const double threshold = threshold_fraction * peak_value;
  std::size_t lo = peak;
  while (lo > 0 && mag[lo - 1] >= threshold) --lo;
  std::size_t hi = peak;
  while (hi + 1 < mag.size() && mag[hi + 1] >= threshold) ++hi;

  TransparencyWindow window;
  window.center = spectrum.grid[peak];
  window.peak_transmission = peak_value;
  window.bandwidth = spectrum.grid[hi] - spectrum.grid[lo];
  window.required_bandwidth = required_bandwidth;
  window.pulse_compatible = window.bandwidth >= required_bandwidth;
  return window;
}

double ats_line_shape(double omega, std::span<const double> params) {
  // 1 - two positive Lorentzian dips.
  return 1.0 - params[0] * lorentzian(omega, params[1], params[2]) -
         params[3] * lorentzian(omega, params[4], params[5]);
}

double eit_line_shape(double omega, std::span<const double> params) {
  // 1 - broad dip + narrow transparency peak.
  return 1.0 - params[0] * lorentzian(omega, params[1], params[2]) +
         params[3] * lorentzian(omega, params[4], params[5]);
}

ModelComparison aic_discriminate(const FrequencyGrid& grid, std::span<const double> magnitude) {
  if (grid.size() != magnitude.size()) throw GridError("aic_discriminate: length mismatch");
  const std::size_t n = grid.size();
  if (n < 16) throw GridError("aic_discriminate: trace too short");
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!grid.locally_uniform(i, 1e-6)) {
      throw GridError("aic_discriminate: uniform grid required");
    }
  }

  std::vector<double> y(magnitude.begin(), magnitude.end());
  const double span = grid.back() - grid.front();

  // Starting structure from the dip geometry.
  const std::vector<std::size_t> minima = local_minima(y);
  std::size_t dip1 = n / 3, dip2 = 2 * n / 3;
  if (minima.size() >= 2) {
    // Two deepest minima.
    std::vector<std::size_t> sorted = minima;
    std::sort(sorted.begin(), sorted.end(),
              [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    dip1 = sorted[0];
    dip2 = sorted[1];
    if (grid[dip1] > grid[dip2]) std::swap(dip1, dip2);
  } else if (minima.size() == 1) {
    dip1 = dip2 = minima.front();
  }
  const double depth1 = std::max(1.0 - y[dip1], 1e-3);
  const double depth2 = std::max(1.0 - y[dip2], 1e-3);
  const double dip_sep = std::max(grid[dip2] - grid[dip1], span / 50.0);

  auto fit_model = [&](double (*model)(double, std::span<const double>),
                       std::vector<double> initial) {
    auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
      std::vector<double> p = x;
      p[2] = std::abs(p[2]);
      p[5] = std::abs(p[5]);
      for (std::size_t i = 0; i < n; ++i) r[i] = model(grid[i], p) - y[i];
    };
    FitReport report = fit_least_squares_noexcept(residual, n, std::move(initial));
    report.parameters[2] = std::abs(report.parameters[2]);
    report.parameters[5] = std::abs(report.parameters[5]);
    return report;
  };

  // ATS candidate: one dip per dressed state.
  FitReport ats = fit_model(&ats_line_shape, {depth1, grid[dip1], 0.25 * dip_sep,
                                              depth2, grid[dip2], 0.25 * dip_sep});

  // EIT candidate: broad dip at the trace center, narrow peak between the dips.
  const std::size_t mid_lo = std::min(dip1, dip2);
  const std::size_t mid_hi = std::max(dip1, dip2);
  std::size_t peak = (mid_lo + mid_hi) / 2;
  for (std::size_t i = mid_lo; i <= mid_hi; ++i) {
    if (y[i] > y[peak]) peak = i;
  }
  const double dip_floor = std::min(y[dip1], y[dip2]);
  FitReport eit = fit_model(&eit_line_shape,
                            {std::max(1.0 - dip_floor, 1e-3), grid[peak], 1.2 * dip_sep,
                             std::max(y[peak] - dip_floor, 1e-3), grid[peak], 0.2 * dip_sep});

  ModelComparison comparison;
  comparison.ats_rss = ats.rss;
  comparison.eit_rss = eit.rss;
  comparison.ats_params = ats.parameters;
  comparison.eit_params = eit.parameters;
  // A fit is usable once it reached a finite residual at finite parameters; a
  // candidate that merely crawls against the wrong line shape is a poor fit,
  // which is exactly what the comparison scores.
  auto usable = [](const FitReport& r) {
    if (!std::isfinite(r.rss)) return false;
    for (double p : r.parameters) {
      if (!std::isfinite(p)) return false;
    }
    return true;
  };
  comparison.valid = usable(ats) && usable(eit);
  if (!comparison.valid) {
    comparison.diagnostics = "fit failure: ats=" + ats.message + ", eit=" + eit.message;
    return comparison;
  }

  constexpr std::size_t kParams = 6;
  comparison.ats_aic = aic_score(ats.rss, n, kParams);
  comparison.eit_aic = aic_score(eit.rss, n, kParams);
  const double best = std::min(comparison.ats_aic, comparison.eit_aic);
  const double wa = std::exp(-0.5 * (comparison.ats_aic - best));
  const double we = std::exp(-0.5 * (comparison.eit_aic - best));
  comparison.ats_weight = wa / (wa + we);
  comparison.eit_weight = we / (wa + we);
  comparison.diagnostics = "ok";
  return comparison;
}

ModelComparison aic_discriminate(const ComplexSpectrum& spectrum) {
  std::vector<double> mag(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) mag[i] = std::abs(spectrum.values[i]);
  return aic_discriminate(spectrum.grid, mag);
}

}  // namespace slowlight
