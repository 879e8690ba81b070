#pragma once

#include <span>
#include <string>
#include <vector>

#include "slowlight/band_structure.hpp"
#include "slowlight/fitting.hpp"
#include "slowlight/transfer_matrix.hpp"

namespace slowlight {

// Sequential +-2pi unwrap of Arg(S21). Throws GridError when a raw step
// reaches pi (grid too coarse to unwrap).
std::vector<double> unwrap_phase(const ComplexSpectrum& spectrum);

// Delay from the phase gradient: tau = dArg(S21)/domega at omega_eval,
// averaged (least-squares slope) over averaging_bandwidth; 0 means a single
// central difference. n_g = c0 tau / ((N-1) d).
DelayEstimate phase_gradient_delay(const ComplexSpectrum& spectrum, std::size_t n_qubits,
                                   double spacing, double omega_eval,
                                   double averaging_bandwidth = 0.0);

struct TransparencyWindow {
  double center = 0.0;             // rad/s
  double bandwidth = 0.0;          // rad/s above threshold_fraction * peak
  double peak_transmission = 0.0;  // |S21| at the window maximum
  double required_bandwidth = 0.0;
  bool pulse_compatible = false;   // bandwidth >= required_bandwidth
};

// Finds the transmission maximum between two dips and measures its threshold
// bandwidth. Throws StructureNotFoundError when no interior maximum exists.
TransparencyWindow window_metrics(const ComplexSpectrum& spectrum,
                                  double threshold_fraction = 0.5,
                                  double required_bandwidth = 0.0);

struct ModelComparison {
  double ats_rss = 0.0, eit_rss = 0.0;
  double ats_aic = 0.0, eit_aic = 0.0;
  double ats_weight = 0.0, eit_weight = 0.0;
  std::vector<double> ats_params;  // depth1, center1, width1, depth2, center2, width2
  std::vector<double> eit_params;  // dip_depth, dip_center, dip_width, peak_height, peak_center, peak_width
  bool valid = false;
  std::string diagnostics;
};

// Fits the two candidate line shapes to a |S21| trace on a uniform grid and
// scores them with AIC = n ln(RSS/n) + 2p:
//   ATS: 1 - two positive Lorentzian dips;
//   EIT: 1 - broad Lorentzian dip + narrow transparency Lorentzian.
// Background-free model traces only.
ModelComparison aic_discriminate(const FrequencyGrid& grid, std::span<const double> magnitude);
ModelComparison aic_discriminate(const ComplexSpectrum& spectrum);

// Candidate models, exposed for tests and synthetic traces.
double ats_line_shape(double omega, std::span<const double> params);
double eit_line_shape(double omega, std::span<const double> params);

}  // namespace slowlight
