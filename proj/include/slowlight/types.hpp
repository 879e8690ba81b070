#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace slowlight {

// Three-level transmon emitter. All rates and frequencies are angular (rad/s).
struct TransmonQubit {
  double omega10 = 0.0;        // 0->1 transition frequency
  double anharmonicity = 0.0;  // omega10 - omega21, positive for transmons
  double Gamma10 = 0.0;        // radiative relaxation rate of 1->0
  double Gamma_nr = 0.0;       // non-radiative decoherence rate
  double gamma20 = 0.0;        // decoherence rate of the 2->0 transition
  std::optional<double> Gamma21;  // radiative relaxation 2->1; defaults to 2*Gamma10

  double gamma10() const { return 0.5 * Gamma10 + Gamma_nr; }
  double omega21() const { return omega10 - anharmonicity; }
  // Transmon matrix elements scale as sqrt(j+1), so the 2->1 rate defaults
  // to twice the 1->0 rate when it was not measured.
  double Gamma21_or_default() const { return Gamma21 ? *Gamma21 : 2.0 * Gamma10; }

  TransmonQubit tuned_to(double new_omega10) const {
    TransmonQubit q = *this;
    q.omega10 = new_omega10;
    return q;
  }
  TransmonQubit detuned_by(double delta) const { return tuned_to(omega10 + delta); }
  TransmonQubit lossless() const {
    TransmonQubit q = *this;
    q.Gamma_nr = 0.0;
    q.gamma20 = 0.0;
    return q;
  }

  // Throws InvalidParameterError on non-finite or out-of-range fields.
  void validate() const;
  // Soft checks (e.g. gamma20 > Gamma21/2). Violations are reported, not fatal:
  // measured parameter sets may break them within error bars.
  std::vector<std::string> consistency_warnings() const;
};

// Control tone driving the 2->1 transition.
struct ControlDrive {
  double omega_c = 0.0;  // rad/s
  double Omega_c = 0.0;  // Rabi strength, rad/s; 0 means control off

  static ControlDrive off() { return {0.0, 0.0}; }
  static ControlDrive resonant(const TransmonQubit& q, double Omega) {
    return {q.omega21(), Omega};
  }

  void validate() const;
};

// Strictly increasing probe frequencies (rad/s).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> omegas);
  static FrequencyGrid linspace(double omega_lo, double omega_hi, std::size_t n);
  static FrequencyGrid centered(double omega_center, double span, std::size_t n);

  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t i) const { return omegas_[i]; }
  double front() const { return omegas_.front(); }
  double back() const { return omegas_.back(); }
  const std::vector<double>& omegas() const { return omegas_; }
  const double* data() const { return omegas_.data(); }

  std::size_t nearest_index(double omega) const;
  // True when the spacing around index i (needs 1 <= i <= size-2) is uniform
  // to the given relative tolerance.
  bool locally_uniform(std::size_t i, double rel_tol = 1e-6) const;

  auto begin() const { return omegas_.begin(); }
  auto end() const { return omegas_.end(); }

 private:
  std::vector<double> omegas_;
};

}  // namespace slowlight
