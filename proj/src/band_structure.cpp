#include "slowlight/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

constexpr double kImagTol = 1e-12;
// Branch jumps larger than this (in kd units) are flagged instead of accepted.
constexpr double kContinuityLimit = 0.5;

// Candidate kd solutions of cos(kd) = w: +-acos(w) + 2 pi n.
void candidates(complexd w, complexd out[6]) {
  const complexd a = std::acos(w);
  out[0] = a;
  out[1] = -a;
  out[2] = a + kTwoPi;
  out[3] = a - kTwoPi;
  out[4] = -a + kTwoPi;
  out[5] = -a - kTwoPi;
}

complexd pick_nearest(complexd w, complexd target, bool require_decaying) {
  complexd cand[6];
  candidates(w, cand);
  complexd best = cand[0];
  double best_dist = std::numeric_limits<double>::infinity();
  for (const complexd& c : cand) {
    if (require_decaying && c.imag() < -kImagTol) continue;
    const double dist = std::abs(c - target);
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

}  // namespace

complexd chi_parameter(complexd r) {
  const complexd t = 1.0 + r;
  if (t == complexd(0.0, 0.0)) {
    throw SingularScattererError("chi_parameter: 1 + r = 0", 0, 0.0);
  }
  return complexd(0.0, 1.0) * r / t;
}

complexd quadratic_kd(double phi, complexd chi) {
  complexd kd = std::sqrt(complexd(phi * phi, 0.0) - 2.0 * chi * phi);
  if (kd.imag() < 0.0) kd = -kd;
  return kd;
}

BlochSolution::BlochSolution(FrequencyGrid g, double d)
    : grid(std::move(g)),
      kd(grid.size()),
      in_gap(grid.size(), false),
      discontinuity(grid.size(), false),
      spacing(d) {}

bool BlochSolution::any_discontinuity() const {
  return std::find(discontinuity.begin(), discontinuity.end(), true) != discontinuity.end();
}

BlochSolution bloch_k(const ChainLayout& unit_cell, const ControlDrive& drive,
                      const FrequencyGrid& grid) {
  unit_cell.validate();
  drive.validate();
  if (unit_cell.size() != 1) {
    throw InvalidParameterError("bloch_k: unit cell must hold exactly one qubit");
  }
  const TransmonQubit& qubit = unit_cell.qubits.front();

  BlochSolution solution(grid, unit_cell.spacing);
  complexd previous;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double omega = grid[i];
    const double phi = unit_cell.medium.phase(omega, unit_cell.spacing);
    const complexd chi = chi_parameter(reflection(qubit, drive, omega));
    const complexd w = std::cos(phi) + chi * std::sin(phi);

    complexd kd;
    if (i == 0) {
      // Seed in the transparent region: kd ~ phi.
      kd = pick_nearest(w, complexd(phi, 0.0), true);
    } else {
      kd = pick_nearest(w, previous, true);
      if (std::abs(kd - previous) > kContinuityLimit) {
        solution.discontinuity[i] = true;
      }
    }
    previous = kd;
    solution.kd[i] = kd;
    // Real-line gap: cos(kd) real with magnitude above one.
    solution.in_gap[i] =
        std::abs(w.imag()) <= kImagTol * (1.0 + std::abs(w.real())) && std::abs(w.real()) > 1.0;
  }
  return solution;
}

std::vector<LosslessBands> lossless_bands(const TransmonQubit& qubit,
                                          std::span<const double> Omega_c_list,
                                          const FrequencyGrid& grid, double spacing,
                                          const PropagationMedium& medium) {
  const TransmonQubit lossless = qubit.lossless();
  ChainLayout cell{{lossless}, spacing, medium};

  std::vector<LosslessBands> bands;
  bands.reserve(Omega_c_list.size());
  for (double Omega_c : Omega_c_list) {
    const ControlDrive drive =
        Omega_c > 0.0 ? ControlDrive::resonant(lossless, Omega_c) : ControlDrive::off();
    LosslessBands entry{Omega_c, bloch_k(cell, drive, grid), {}};
    // Contiguous in-gap runs become gap intervals.
    std::size_t i = 0;
    while (i < grid.size()) {
      if (!entry.solution.in_gap[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < grid.size() && entry.solution.in_gap[j + 1]) ++j;
      entry.gap_intervals.emplace_back(grid[i], grid[j]);
      i = j + 1;
    }
    bands.push_back(std::move(entry));
  }
  return bands;
}

DelayEstimate group_delay_numeric(const BlochSolution& bloch, std::size_t n_qubits,
                                  double spacing, double omega_eval) {
  if (bloch.grid.size() < 3) throw GridError("group_delay_numeric: grid too small");
  const std::size_t i = bloch.grid.nearest_index(omega_eval);
  if (i == 0 || i + 1 >= bloch.grid.size()) {
    throw GridError("group_delay_numeric: omega_eval needs an interior stencil");
  }
  if (!bloch.grid.locally_uniform(i, 1e-3)) {
    throw GridError("group_delay_numeric: grid not locally uniform at omega_eval");
  }
  // 1/v_g = Re(dk/domega), central difference in kd/d.
  const double inv_vg = ((bloch.kd[i + 1] - bloch.kd[i - 1]).real() / bloch.spacing) /
                        (bloch.grid[i + 1] - bloch.grid[i - 1]);
  DelayEstimate estimate;
  estimate.regime = DelayRegime::numeric;
  estimate.tau = static_cast<double>(n_qubits - 1) * spacing * inv_vg;
  estimate.group_index = kVacuumLightSpeed * inv_vg;
  estimate.out_of_validity = bloch.discontinuity[i - 1] || bloch.discontinuity[i] ||
                             bloch.discontinuity[i + 1];
  return estimate;
}

DelayEstimate delay_asymptote(const TransmonQubit& qubit, double Omega_c,
                              std::size_t n_qubits, double spacing, double phi,
                              DelayRegime regime) {
  qubit.validate();
  if (regime != DelayRegime::strong_drive && regime != DelayRegime::weak_drive) {
    throw InvalidParameterError("delay_asymptote: pick an asymptotic branch");
  }
  if (!std::isfinite(Omega_c) || Omega_c < 0.0 || !std::isfinite(phi) || phi <= 0.0) {
    throw InvalidParameterError("delay_asymptote: bad Omega_c or phi");
  }
  const double gamma10 = qubit.gamma10();
  const double gamma20 = qubit.gamma20;
  const double n_minus_1 = static_cast<double>(n_qubits - 1);

  const double numerator =
      qubit.Gamma10 * (2.0 * Omega_c * Omega_c - 8.0 * gamma20 * gamma20);
  const double base = (4.0 * gamma10 - 2.0 * qubit.Gamma10) * gamma20 + Omega_c * Omega_c;
  if (base == 0.0) {
    throw SingularModelError("delay_asymptote: zero asymptote denominator");
  }

  DelayEstimate estimate;
  estimate.regime = regime;
  if (regime == DelayRegime::strong_drive) {
    estimate.tau = n_minus_1 * numerator / (base * base);
  } else {
    if (gamma20 <= 0.0) {
      throw SingularModelError("delay_asymptote: weak-drive branch needs gamma20 > 0");
    }
    estimate.tau = n_minus_1 * numerator / std::pow(base, 1.5) * std::sqrt(phi) /
                   std::sqrt(8.0 * qubit.Gamma10 * gamma20);
  }
  estimate.group_index = kVacuumLightSpeed * estimate.tau / (n_minus_1 * spacing);
  // The closed form is only meaningful where the numerator is positive; the
  // zero crossing at Omega_c = 2 gamma20 marks the validity boundary.
  estimate.out_of_validity = numerator <= 0.0;
  return estimate;
}

BandgapWidth bandgap_width_coefficient(std::size_t n_qubits, double phi) {
  if (!std::isfinite(phi) || phi <= 0.0) {
    throw InvalidParameterError("bandgap_width_coefficient: phi must be positive");
  }
  const double n = static_cast<double>(n_qubits);
  BandgapWidth result;
  result.xi = (n * n - 1.0) * phi / 3.0;
  // The finite-chain formula needs N well below pi/phi; flag the last 5 %.
  result.within_validity = n < 0.95 * (kTwoPi / 2.0) / phi;
  return result;
}

}  // namespace slowlight
