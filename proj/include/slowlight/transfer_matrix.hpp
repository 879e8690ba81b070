#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "slowlight/core_model.hpp"
#include "slowlight/types.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

using complexd = std::complex<double>;

// 2x2 complex transfer matrix acting on (right-moving, left-moving) field
// amplitudes. Right-side fields = T * left-side fields.
struct Mat2c {
  complexd m00{1.0, 0.0}, m01{0.0, 0.0};
  complexd m10{0.0, 0.0}, m11{1.0, 0.0};

  static Mat2c identity() { return {}; }
  complexd trace() const { return m00 + m11; }
  complexd det() const { return m00 * m11 - m01 * m10; }
  Mat2c operator*(const Mat2c& rhs) const {
    return {m00 * rhs.m00 + m01 * rhs.m10, m00 * rhs.m01 + m01 * rhs.m11,
            m10 * rhs.m00 + m11 * rhs.m10, m10 * rhs.m01 + m11 * rhs.m11};
  }
};

struct PropagationMedium {
  double phase_velocity = 0.0;  // m/s, effective velocity of the coplanar line

  // Velocity pinned so that a given spacing accumulates phase phi_ref at
  // omega_ref. The stock device: phi(2pi*8 GHz) = 0.16 over d = 400 um.
  static PropagationMedium calibrated(double spacing = 400e-6,
                                      double phi_ref = 0.16,
                                      double omega_ref = kTwoPi * 8e9);
  double phase(double omega, double distance) const { return omega * distance / phase_velocity; }
  void validate() const;
};

struct ChainLayout {
  std::vector<TransmonQubit> qubits;
  double spacing = 0.0;  // m, uniform
  PropagationMedium medium;

  std::size_t size() const { return qubits.size(); }
  static ChainLayout uniform(const TransmonQubit& q, std::size_t n, double spacing,
                             const PropagationMedium& medium);
  void validate() const;
};

// Frequency grid with one complex S21 sample per point; the exchange format
// between the scattering, analysis, and pulse stages.
struct ComplexSpectrum {
  FrequencyGrid grid;
  std::vector<complexd> values;

  ComplexSpectrum(FrequencyGrid g, std::vector<complexd> v);
  static ComplexSpectrum constant(const FrequencyGrid& g, complexd value);
  std::size_t size() const { return values.size(); }
};

// T-matrix of a symmetric scatterer with reflection r and transmission t.
Mat2c scatterer_tmatrix(complexd r, complexd t);
// Qubit scatterer (t = 1 + r). Throws SingularScattererError when 1 + r = 0.
Mat2c qubit_tmatrix(complexd r);
// Bare line segment: diag(e^{i phi}, e^{-i phi}).
Mat2c phase_tmatrix(double phi);

enum class LinePhase {
  include,  // raw response, carries the e^{i(N-1)phi} line background
  removed,  // referenced to the bare line, for delay extraction
};

// Composite T-matrix of the chain at a single frequency (N qubits, N-1
// segments, no leading/trailing half-segments).
Mat2c chain_composite_matrix(const ChainLayout& layout, const ControlDrive& drive,
                             double omega);

// Chain transmission on a grid. Reduces to transmission() for N = 1.
ComplexSpectrum chain_s21(const ChainLayout& layout, const ControlDrive& drive,
                          const FrequencyGrid& grid, LinePhase phase = LinePhase::include);

struct ChainResponse {
  ComplexSpectrum s21;
  ComplexSpectrum s11;
};
// Transmission and left-port reflection from the same composite matrix.
ChainResponse chain_scatter(const ChainLayout& layout, const ControlDrive& drive,
                            const FrequencyGrid& grid, LinePhase phase = LinePhase::include);

// Smooth measurement background: overall scale plus an optional pair of weak
// mismatch reflectors producing a standing-wave ripple. Stand-in for unpublished
// cabling, disabled by default.
struct BackgroundModel {
  struct Reflector {
    double reflectivity = 0.0;  // in [0, 1)
    double position = 0.0;      // m along the line
  };
  double scale = 1.0;  // a > 0
  std::vector<Reflector> reflectors;
  double phase_velocity = kVacuumLightSpeed;

  static BackgroundModel ideal() { return {}; }
  void validate() const;
};

// Background transmission S21^bg on a grid (unity when no reflectors).
ComplexSpectrum background_response(const BackgroundModel& background, const FrequencyGrid& grid);
// Synthesizes measured-like data: a * S21^bg(omega) * s(omega).
ComplexSpectrum apply_background(const ComplexSpectrum& spectrum, const BackgroundModel& background);
// S21 = S21_meas / (a * S21_bg), pointwise. Grid mismatch -> GridError;
// background zeros -> SingularModelError.
ComplexSpectrum normalize(const ComplexSpectrum& measured, const ComplexSpectrum& background_reference,
                          double a);

}  // namespace slowlight
