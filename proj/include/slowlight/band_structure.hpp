#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "slowlight/transfer_matrix.hpp"
#include "slowlight/types.hpp"

namespace slowlight {

// chi = i r / (1 + r), the per-cell scattering parameter of the dispersion
// relation cos(kd) = cos(phi) + chi sin(phi).
complexd chi_parameter(complexd r);

// Large-wavelength approximation (kd)^2 = phi^2 - 2 chi phi, root with
// Im(kd) >= 0.
complexd quadratic_kd(double phi, complexd chi);

enum class BlochBranch { principal, secondary };

// Complex Bloch wavenumber of the infinite lattice, as k*d per grid point.
struct BlochSolution {
  FrequencyGrid grid;
  std::vector<complexd> kd;
  std::vector<bool> in_gap;          // real-line bandgap (|cos(kd)| > 1, lossless solves)
  std::vector<bool> discontinuity;   // branch tracking could not stay continuous here
  BlochBranch branch = BlochBranch::principal;
  double spacing = 0.0;              // d in meters

  BlochSolution(FrequencyGrid g, double d);
  bool any_discontinuity() const;
};

// Solves cos(kd) = (1/2)Tr(T1 Tphi) along the grid. The branch is seeded in
// the transparent region at the lowest grid frequency (kd ~ phi) and tracked
// by continuity with Im(kd) >= 0; breaks are flagged, never silently wrapped.
// The unit cell must hold exactly one qubit.
BlochSolution bloch_k(const ChainLayout& unit_cell, const ControlDrive& drive,
                      const FrequencyGrid& grid);

struct LosslessBands {
  double Omega_c = 0.0;
  BlochSolution solution;
  std::vector<std::pair<double, double>> gap_intervals;  // [omega_lo, omega_hi]
};

// Band structure in the lossless limit (Gamma_nr = 0, gamma20 = 0) for each
// control strength, with resonant control. Gaps are contiguous |cos(kd)| > 1
// runs on the grid.
std::vector<LosslessBands> lossless_bands(const TransmonQubit& qubit,
                                          std::span<const double> Omega_c_list,
                                          const FrequencyGrid& grid, double spacing,
                                          const PropagationMedium& medium);

enum class DelayRegime {
  strong_drive,  // phi >> chi branch
  weak_drive,    // phi << chi branch
  numeric,
};

struct DelayEstimate {
  double tau = 0.0;          // s
  double group_index = 0.0;  // n_g = c0 * tau / ((N-1) d)
  DelayRegime regime = DelayRegime::numeric;
  bool out_of_validity = false;
};

// Group delay from the Bloch solution: 1/v_g = Re(dk/domega) by central
// difference at omega_eval; tau = (N-1) d / v_g (includes the bare-line
// traversal). Requires interior, locally uniform stencil.
DelayEstimate group_delay_numeric(const BlochSolution& bloch, std::size_t n_qubits,
                                  double spacing, double omega_eval);

// Closed-form resonant delay of the selected asymptotic branch, relative to
// the bare line. Out-of-validity results (negative numerator, boundary) are
// tagged, not clamped.
DelayEstimate delay_asymptote(const TransmonQubit& qubit, double Omega_c,
                              std::size_t n_qubits, double spacing, double phi,
                              DelayRegime regime);

struct BandgapWidth {
  double xi = 0.0;  // gap width in units of gamma10
  bool within_validity = true;
};

// xi = (N^2 - 1) phi / 3, the finite-chain gap-width coefficient. Flagged
// out of validity as N approaches pi/phi.
BandgapWidth bandgap_width_coefficient(std::size_t n_qubits, double phi);

}  // namespace slowlight
