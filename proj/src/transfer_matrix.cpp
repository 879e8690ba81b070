#include "slowlight/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/kernels.hpp"

namespace slowlight {

namespace {

kernels::QubitParams kernel_params(const TransmonQubit& q, const ControlDrive& drive) {
  return {q.omega10, q.gamma10(), q.Gamma10, q.gamma20, drive.omega_c - q.omega21()};
}

void check_chain_inputs(const ChainLayout& layout, const ControlDrive& drive) {
  layout.validate();
  drive.validate();
}

// The kernels only report a non-finite sample; re-walk the offending grid
// point through the matrix path to name the singular qubit.
[[noreturn]] void raise_singular_point(const ChainLayout& layout, const ControlDrive& drive,
                                       double omega) {
  for (std::size_t q = 0; q < layout.size(); ++q) {
    const complexd r = reflection(layout.qubits[q], drive, omega);
    if (1.0 + r == complexd(0.0, 0.0)) {
      throw SingularScattererError(
          "chain_s21: perfect extinction at qubit " + std::to_string(q) + ", frequency " +
              std::to_string(angular_to_hz(omega)) +
              " Hz; regularize with nonzero Gamma_nr or move the grid",
          q, omega);
    }
  }
  throw SingularScattererError("chain_s21: non-finite response at frequency " +
                                   std::to_string(angular_to_hz(omega)) + " Hz",
                               layout.size(), omega);
}

}  // namespace

PropagationMedium PropagationMedium::calibrated(double spacing, double phi_ref, double omega_ref) {
  PropagationMedium medium{omega_ref * spacing / phi_ref};
  medium.validate();
  return medium;
}

void PropagationMedium::validate() const {
  if (!std::isfinite(phase_velocity) || phase_velocity <= 0.0 ||
      phase_velocity > kVacuumLightSpeed) {
    throw InvalidParameterError("PropagationMedium: phase velocity must be in (0, c0]");
  }
}

ChainLayout ChainLayout::uniform(const TransmonQubit& q, std::size_t n, double spacing,
                                 const PropagationMedium& medium) {
  ChainLayout layout{std::vector<TransmonQubit>(n, q), spacing, medium};
  layout.validate();
  return layout;
}

void ChainLayout::validate() const {
  if (qubits.empty()) throw InvalidParameterError("ChainLayout: no qubits");
  if (!std::isfinite(spacing) || spacing <= 0.0) {
    throw InvalidParameterError("ChainLayout: spacing must be positive");
  }
  medium.validate();
  for (const auto& q : qubits) q.validate();
}

ComplexSpectrum::ComplexSpectrum(FrequencyGrid g, std::vector<complexd> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (grid.size() != values.size()) {
    throw GridError("ComplexSpectrum: grid/value length mismatch");
  }
}

ComplexSpectrum ComplexSpectrum::constant(const FrequencyGrid& g, complexd value) {
  return ComplexSpectrum(g, std::vector<complexd>(g.size(), value));
}

Mat2c scatterer_tmatrix(complexd r, complexd t) {
  if (t == complexd(0.0, 0.0)) {
    throw SingularScattererError("scatterer_tmatrix: zero transmission", 0, 0.0);
  }
  const complexd inv_t = 1.0 / t;
  return {(t * t - r * r) * inv_t, r * inv_t, -r * inv_t, inv_t};
}

Mat2c qubit_tmatrix(complexd r) {
  const complexd t = 1.0 + r;
  if (t == complexd(0.0, 0.0)) {
    throw SingularScattererError(
        "qubit_tmatrix: perfect extinction (1 + r = 0); regularize with nonzero Gamma_nr "
        "or move the grid off resonance",
        0, 0.0);
  }
  return scatterer_tmatrix(r, t);
}

Mat2c phase_tmatrix(double phi) {
  if (!std::isfinite(phi)) throw InvalidParameterError("phase_tmatrix: non-finite phase");
  const complexd e{std::cos(phi), std::sin(phi)};
  return {e, 0.0, 0.0, std::conj(e)};
}

Mat2c chain_composite_matrix(const ChainLayout& layout, const ControlDrive& drive,
                             double omega) {
  check_chain_inputs(layout, drive);
  const double phi = layout.medium.phase(omega, layout.spacing);
  Mat2c m = Mat2c::identity();
  for (std::size_t q = 0; q < layout.size(); ++q) {
    const complexd r = reflection(layout.qubits[q], drive, omega);
    Mat2c tq;
    try {
      tq = qubit_tmatrix(r);
    } catch (const SingularScattererError&) {
      throw SingularScattererError("chain: singular scatterer (perfect extinction)", q, omega);
    }
    m = (q == 0) ? tq : tq * phase_tmatrix(phi) * m;
  }
  return m;
}

ChainResponse chain_scatter(const ChainLayout& layout, const ControlDrive& drive,
                            const FrequencyGrid& grid, LinePhase phase) {
  check_chain_inputs(layout, drive);

  std::vector<kernels::QubitParams> params;
  params.reserve(layout.size());
  for (const auto& q : layout.qubits) params.push_back(kernel_params(q, drive));

  kernels::ChainParams chain{params.data(),          params.size(),
                             layout.spacing,         layout.medium.phase_velocity,
                             drive.Omega_c * drive.Omega_c,
                             phase == LinePhase::removed};

  const std::size_t n = grid.size();
  std::vector<double> s21_re(n), s21_im(n), s11_re(n), s11_im(n);
  kernels::chain_s21_grid(chain, grid.data(), n, s21_re.data(), s21_im.data(), s11_re.data(),
                          s11_im.data());

  std::vector<complexd> s21(n), s11(n);
  for (std::size_t i = 0; i < n; ++i) {
    s21[i] = {s21_re[i], s21_im[i]};
    s11[i] = {s11_re[i], s11_im[i]};
    if (!std::isfinite(s21_re[i]) || !std::isfinite(s21_im[i])) {
      raise_singular_point(layout, drive, grid[i]);
    }
  }
  return {ComplexSpectrum(grid, std::move(s21)), ComplexSpectrum(grid, std::move(s11))};
}

ComplexSpectrum chain_s21(const ChainLayout& layout, const ControlDrive& drive,
                          const FrequencyGrid& grid, LinePhase phase) {
  check_chain_inputs(layout, drive);

  std::vector<kernels::QubitParams> params;
  params.reserve(layout.size());
  for (const auto& q : layout.qubits) params.push_back(kernel_params(q, drive));

  kernels::ChainParams chain{params.data(),          params.size(),
                             layout.spacing,         layout.medium.phase_velocity,
                             drive.Omega_c * drive.Omega_c,
                             phase == LinePhase::removed};

  const std::size_t n = grid.size();
  std::vector<double> s21_re(n), s21_im(n);
  kernels::chain_s21_grid(chain, grid.data(), n, s21_re.data(), s21_im.data(), nullptr, nullptr);

  std::vector<complexd> s21(n);
  for (std::size_t i = 0; i < n; ++i) {
    s21[i] = {s21_re[i], s21_im[i]};
    if (!std::isfinite(s21_re[i]) || !std::isfinite(s21_im[i])) {
      raise_singular_point(layout, drive, grid[i]);
    }
  }
  return ComplexSpectrum(grid, std::move(s21));
}

void BackgroundModel::validate() const {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw InvalidParameterError("BackgroundModel: scale must be positive");
  }
  if (!std::isfinite(phase_velocity) || phase_velocity <= 0.0) {
    throw InvalidParameterError("BackgroundModel: bad phase velocity");
  }
  for (const auto& refl : reflectors) {
    if (!std::isfinite(refl.reflectivity) || refl.reflectivity < 0.0 || refl.reflectivity >= 1.0) {
      throw InvalidParameterError("BackgroundModel: reflectivity must be in [0, 1)");
    }
    if (!std::isfinite(refl.position)) {
      throw InvalidParameterError("BackgroundModel: non-finite reflector position");
    }
  }
}

ComplexSpectrum background_response(const BackgroundModel& background, const FrequencyGrid& grid) {
  background.validate();
  std::vector<complexd> values(grid.size(), complexd{1.0, 0.0});
  if (!background.reflectors.empty()) {
    auto sorted = background.reflectors;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.position < b.position; });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Mat2c m = Mat2c::identity();
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        // Lossless symmetric mirror: r = i rho, t = sqrt(1 - rho^2).
        const double rho = sorted[k].reflectivity;
        const Mat2c mirror = scatterer_tmatrix(complexd{0.0, rho}, std::sqrt(1.0 - rho * rho));
        if (k == 0) {
          m = mirror;
        } else {
          const double phi = grid[i] * (sorted[k].position - sorted[k - 1].position) /
                             background.phase_velocity;
          m = mirror * phase_tmatrix(phi) * m;
        }
      }
      values[i] = 1.0 / m.m11;
    }
  }
  return ComplexSpectrum(grid, std::move(values));
}

ComplexSpectrum apply_background(const ComplexSpectrum& spectrum, const BackgroundModel& background) {
  ComplexSpectrum bg = background_response(background, spectrum.grid);
  std::vector<complexd> values(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    values[i] = background.scale * bg.values[i] * spectrum.values[i];
  }
  return ComplexSpectrum(spectrum.grid, std::move(values));
}

ComplexSpectrum normalize(const ComplexSpectrum& measured, const ComplexSpectrum& background_reference,
                          double a) {
  if (!std::isfinite(a) || a <= 0.0) throw InvalidParameterError("normalize: a must be positive");
  if (measured.size() != background_reference.size()) {
    throw GridError("normalize: grid mismatch");
  }
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (measured.grid[i] != background_reference.grid[i]) {
      throw GridError("normalize: grid mismatch");
    }
  }
  std::vector<complexd> values(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const complexd denom = a * background_reference.values[i];
    if (denom == complexd(0.0, 0.0)) {
      throw SingularModelError("normalize: zero background value at index " + std::to_string(i));
    }
    values[i] = measured.values[i] / denom;
  }
  return ComplexSpectrum(measured.grid, std::move(values));
}

}  // namespace slowlight
