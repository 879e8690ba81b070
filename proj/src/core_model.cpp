#include "slowlight/core_model.hpp"

#include <cmath>
#include <complex>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

using complexd = std::complex<double>;

void check_finite_inputs(const TransmonQubit& qubit, const ControlDrive& drive, double omega) {
  qubit.validate();
  drive.validate();
  if (!std::isfinite(omega)) throw InvalidParameterError("reflection: non-finite probe frequency");
}

}  // namespace

std::complex<double> reflection(const TransmonQubit& qubit, const ControlDrive& drive,
                                double omega) {
  check_finite_inputs(qubit, drive, omega);

  const double delta = omega - qubit.omega10;
  complexd denominator(2.0 * qubit.gamma10(), -2.0 * delta);
  if (drive.Omega_c > 0.0) {
    // Two-photon detuning of the dressing tone.
    const double delta2 = delta + (drive.omega_c - qubit.omega21());
    const complexd inner(2.0 * qubit.gamma20, -2.0 * delta2);
    if (inner == complexd(0.0, 0.0)) {
      // The control term diverges and pins the qubit transparent.
      return {0.0, 0.0};
    }
    denominator += drive.Omega_c * drive.Omega_c / inner;
  }
  if (denominator == complexd(0.0, 0.0)) {
    throw SingularModelError("reflection: undamped resonance (gamma10 = 0 on resonance)");
  }
  return -qubit.Gamma10 / denominator;
}

std::complex<double> transmission(const TransmonQubit& qubit, const ControlDrive& drive,
                                  double omega) {
  return 1.0 + reflection(qubit, drive, omega);
}

double resonant_transmission(const TransmonQubit& qubit, double Omega_c) {
  qubit.validate();
  if (!std::isfinite(Omega_c) || Omega_c < 0.0) {
    throw InvalidParameterError("resonant_transmission: bad Omega_c");
  }
  const double gamma10 = qubit.gamma10();
  if (gamma10 == 0.0) {
    throw SingularModelError("resonant_transmission: gamma10 = 0");
  }
  if (Omega_c > 0.0 && qubit.gamma20 == 0.0) {
    throw SingularModelError("resonant_transmission: gamma20 = 0 with control on");
  }
  const double saturation = (Omega_c > 0.0)
                                ? Omega_c * Omega_c / (4.0 * qubit.gamma20 * gamma10)
                                : 0.0;
  return 1.0 - (qubit.Gamma10 / (2.0 * gamma10)) / (1.0 + saturation);
}

double rabi_to_power(const TransmonQubit& qubit, const ControlDrive& drive) {
  qubit.validate();
  drive.validate();
  if (qubit.Gamma10 <= 0.0) throw SingularModelError("rabi_to_power: Gamma10 = 0");
  return kHbar * drive.omega_c * drive.Omega_c * drive.Omega_c / (4.0 * qubit.Gamma10);
}

double power_to_rabi(const TransmonQubit& qubit, double power_watts, double omega_c) {
  qubit.validate();
  if (!std::isfinite(power_watts) || power_watts < 0.0) {
    throw InvalidParameterError("power_to_rabi: bad power");
  }
  if (!std::isfinite(omega_c) || omega_c <= 0.0) {
    throw InvalidParameterError("power_to_rabi: bad control frequency");
  }
  if (qubit.Gamma10 <= 0.0) throw SingularModelError("power_to_rabi: Gamma10 = 0");
  return std::sqrt(4.0 * qubit.Gamma10 * power_watts / (kHbar * omega_c));
}

CalibrationResult fit_calibration_factor(std::span<const SplittingPoint> data,
                                         const TransmonQubit& qubit, double omega_c) {
  qubit.validate();
  if (data.size() < 2) {
    throw InvalidParameterError("fit_calibration_factor: need at least two points");
  }
  double min_p = data[0].applied_power, max_p = data[0].applied_power;
  for (const auto& pt : data) {
    if (!std::isfinite(pt.applied_power) || !std::isfinite(pt.splitting) ||
        pt.applied_power <= 0.0) {
      throw InvalidParameterError("fit_calibration_factor: bad data point");
    }
    min_p = std::min(min_p, pt.applied_power);
    max_p = std::max(max_p, pt.applied_power);
  }
  if (max_p - min_p <= 1e-12 * max_p) {
    FitReport degenerate;
    degenerate.message = "all applied powers equal";
    throw FitFailureError("fit_calibration_factor: degenerate power axis", degenerate);
  }

  // splitting = a sqrt(P) is linear in x = sqrt(P): the least-squares slope
  // through the origin has a closed form.
  double sxy = 0.0, sxx = 0.0;
  for (const auto& pt : data) {
    const double x = std::sqrt(pt.applied_power);
    sxy += x * pt.splitting;
    sxx += x * x;
  }
  const double a = sxy / sxx;

  CalibrationResult result;
  result.a = a;
  result.alpha = a * a * kHbar * omega_c / (4.0 * qubit.Gamma10);
  result.report.parameters = {a};
  result.report.converged = true;
  result.report.iterations = 1;
  double rss = 0.0;
  for (const auto& pt : data) {
    const double e = pt.splitting - a * std::sqrt(pt.applied_power);
    rss += e * e;
  }
  result.report.rss = rss;
  result.report.initial_rss = rss;
  result.report.message = "closed-form least squares";
  return result;
}

Gamma20Result extract_gamma20(std::span<const TransmissionPoint> curve,
                              const TransmonQubit& qubit) {
  qubit.validate();
  if (curve.size() < 3) throw InvalidParameterError("extract_gamma20: need at least 3 points");
  double min_p = curve[0].control_power, max_p = curve[0].control_power;
  for (const auto& pt : curve) {
    if (!std::isfinite(pt.control_power) || !std::isfinite(pt.abs_t) || pt.control_power <= 0.0) {
      throw InvalidParameterError("extract_gamma20: bad curve point");
    }
    min_p = std::min(min_p, pt.control_power);
    max_p = std::max(max_p, pt.control_power);
  }
  if (max_p < 10.0 * min_p) {
    throw InvalidParameterError("extract_gamma20: curve must span a decade in control power");
  }

  const double gamma10 = qubit.gamma10();
  const double omega_c = qubit.omega21();
  // Fit parameter is log(gamma20) so the iterate stays positive.
  const double x0 = std::log(gamma10);
  auto model = [&](double gamma20, double p_c) {
    const double omega_sq = 4.0 * qubit.Gamma10 * p_c / (kHbar * omega_c);
    return 1.0 - (qubit.Gamma10 / (2.0 * gamma10)) / (1.0 + omega_sq / (4.0 * gamma20 * gamma10));
  };
  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    const double gamma20 = std::exp(x[0]);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      r[i] = model(gamma20, curve[i].control_power) - curve[i].abs_t;
    }
  };

  FitReport report = fit_least_squares_noexcept(residual, curve.size(), {x0});
  const double gamma20 = std::exp(report.parameters[0]);
  report.parameters = {gamma20};
  if (!report.converged) {
    throw FitFailureError("extract_gamma20: fit did not converge", report);
  }
  // A flat (two-level-like) trace drives the estimate to absurd rates.
  const double cap = kTwoPi * 10e9;
  if (gamma20 > cap || gamma20 < kTwoPi * 1.0) {
    throw FitFailureError("extract_gamma20: estimate diverged (no gamma20 dependence in data)",
                          report);
  }
  return {gamma20, std::move(report)};
}

}  // namespace slowlight
