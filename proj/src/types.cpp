#include "slowlight/types.hpp"

#include <algorithm>
#include <cmath>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void TransmonQubit::validate() const {
  if (!finite(omega10) || !finite(anharmonicity) || !finite(Gamma10) || !finite(Gamma_nr) ||
      !finite(gamma20) || (Gamma21 && !finite(*Gamma21))) {
    throw InvalidParameterError("TransmonQubit: non-finite parameter");
  }
  if (omega10 <= 0.0) throw InvalidParameterError("TransmonQubit: omega10 must be positive");
  if (anharmonicity < 0.0) throw InvalidParameterError("TransmonQubit: negative anharmonicity");
  if (Gamma10 < 0.0 || Gamma_nr < 0.0 || gamma20 < 0.0 || (Gamma21 && *Gamma21 < 0.0)) {
    throw InvalidParameterError("TransmonQubit: negative rate");
  }
}

std::vector<std::string> TransmonQubit::consistency_warnings() const {
  std::vector<std::string> warnings;
  // Ladder-type level structure implies gamma20 > Gamma21/2; measured rows can
  // undershoot within error bars.
  if (gamma20 <= 0.5 * Gamma21_or_default()) {
    warnings.push_back("gamma20 <= Gamma21/2 (" + std::to_string(angular_to_hz(gamma20) / 1e6) +
                       " MHz vs " + std::to_string(angular_to_hz(0.5 * Gamma21_or_default()) / 1e6) +
                       " MHz): inconsistent with a ladder-type three-level emitter");
  }
  return warnings;
}

void ControlDrive::validate() const {
  if (!finite(omega_c) || !finite(Omega_c)) {
    throw InvalidParameterError("ControlDrive: non-finite parameter");
  }
  if (Omega_c < 0.0) throw InvalidParameterError("ControlDrive: Omega_c must be >= 0");
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw GridError("FrequencyGrid: empty");
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (!finite(omegas_[i])) throw GridError("FrequencyGrid: non-finite frequency");
    if (i > 0 && omegas_[i] <= omegas_[i - 1]) {
      throw GridError("FrequencyGrid: frequencies must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::linspace(double omega_lo, double omega_hi, std::size_t n) {
  if (n < 1) throw GridError("FrequencyGrid::linspace: need at least one point");
  if (n == 1) return FrequencyGrid({omega_lo});
  std::vector<double> w(n);
  const double step = (omega_hi - omega_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) w[i] = omega_lo + step * static_cast<double>(i);
  w.back() = omega_hi;
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::centered(double omega_center, double span, std::size_t n) {
  return linspace(omega_center - 0.5 * span, omega_center + 0.5 * span, n);
}

std::size_t FrequencyGrid::nearest_index(double omega) const {
  auto it = std::lower_bound(omegas_.begin(), omegas_.end(), omega);
  if (it == omegas_.begin()) return 0;
  if (it == omegas_.end()) return omegas_.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - omegas_.begin());
  return (omega - omegas_[hi - 1] <= omegas_[hi] - omega) ? hi - 1 : hi;
}

bool FrequencyGrid::locally_uniform(std::size_t i, double rel_tol) const {
  if (i == 0 || i + 1 >= omegas_.size()) return false;
  const double left = omegas_[i] - omegas_[i - 1];
  const double right = omegas_[i + 1] - omegas_[i];
  return std::abs(left - right) <= rel_tol * std::max(left, right);
}

}  // namespace slowlight
