#pragma once

#include <complex>
#include <span>
#include <utility>

#include "slowlight/fitting.hpp"
#include "slowlight/types.hpp"

namespace slowlight {

// Dressed-state reflection amplitude of a single three-level qubit at probe
// frequency omega. With the control off this is the two-level Lorentzian
// -(Gamma10/2)/(gamma10 - i(omega - omega10)).
std::complex<double> reflection(const TransmonQubit& qubit, const ControlDrive& drive,
                                double omega);

// t = 1 + r.
std::complex<double> transmission(const TransmonQubit& qubit, const ControlDrive& drive,
                                  double omega);

// Transmission with probe on omega10 and control on omega21:
// t = 1 - (Gamma10/2gamma10) / (1 + Omega_c^2/(4 gamma20 gamma10)).
double resonant_transmission(const TransmonQubit& qubit, double Omega_c);

// On-chip control power P_c = hbar omega_c Omega_c^2 / (4 Gamma10), in watts.
double rabi_to_power(const TransmonQubit& qubit, const ControlDrive& drive);
// Inverse of rabi_to_power for a given control frequency.
double power_to_rabi(const TransmonQubit& qubit, double power_watts, double omega_c);

// One point of a measured ATS power calibration: applied power (watts,
// instrument side) and the observed dressed-state splitting (rad/s).
struct SplittingPoint {
  double applied_power;
  double splitting;
};

struct CalibrationResult {
  double a;      // splitting = a * sqrt(P_appl)
  double alpha;  // on-chip attenuation factor, P_c = alpha * P_appl
  FitReport report;
};

// Least-squares fit of splitting = a*sqrt(P_appl); alpha = a^2 hbar omega_c/(4 Gamma10).
CalibrationResult fit_calibration_factor(std::span<const SplittingPoint> data,
                                         const TransmonQubit& qubit, double omega_c);

// One point of the resonant-transmission power trace used for the gamma20 fit.
struct TransmissionPoint {
  double control_power;  // on-chip P_c, watts
  double abs_t;          // |t| at probe resonance
};

struct Gamma20Result {
  double gamma20;  // rad/s
  FitReport report;
};

// Fit of the resonant-transmission saturation curve with Gamma10, gamma10
// fixed and the control resonant with the 2->1 transition. Throws
// FitFailureError (with best-so-far state) on non-convergence or when the
// estimate diverges (flat two-level-like input).
Gamma20Result extract_gamma20(std::span<const TransmissionPoint> curve,
                              const TransmonQubit& qubit);

}  // namespace slowlight
