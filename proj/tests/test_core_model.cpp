#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "slowlight/core_model.hpp"
#include "slowlight/errors.hpp"
#include "slowlight/qubit_corpus.hpp"
#include "slowlight/units.hpp"
#include "test_support.hpp"

using namespace slowlight;
using test::averaged_qubit;

TEST_CASE("two-level resonant reflection") {
  const TransmonQubit q = averaged_qubit();
  const auto r = reflection(q, ControlDrive::off(), q.omega10);
  CHECK(r.real() == doctest::Approx(-12.0 / 13.8).epsilon(1e-12));
  CHECK(r.imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(transmission(q, ControlDrive::off(), q.omega10) -
                 std::complex<double>(0.130434782608696, 0.0)) < 1e-12);
}

TEST_CASE("single-qubit extinction matches the measured table") {
  const Corpus corpus = builtin_corpus();
  const auto& q1 = corpus_set(corpus, "measured").qubits.front();
  const TransmonQubit q = q1.to_qubit();
  // Extinction from the tabulated gamma10 = 4.2 MHz.
  const double t_res = 1.0 - q1.Gamma10_over_2pi_MHz / (2.0 * *q1.gamma10_over_2pi_MHz);
  const double extinction = 1.0 - t_res * t_res;
  CHECK(extinction == doctest::Approx(0.983).epsilon(5e-3));
  CHECK(std::abs(100.0 * extinction - *q1.extinction_pct) < 0.5);
  // Same number through the model.
  const auto t_model = transmission(q, ControlDrive::off(), q.omega10);
  CHECK(1.0 - std::norm(t_model) == doctest::Approx(extinction).epsilon(2e-2));
}

TEST_CASE("far-detuned probe is transparent") {
  const TransmonQubit q = averaged_qubit();
  const auto r_near = reflection(q, ControlDrive::off(), q.omega10 + ghz_to_angular(0.3));
  const auto r_far = reflection(q, ControlDrive::off(), q.omega10 + ghz_to_angular(3.0));
  // |r| ~ Gamma10/(2 delta), vanishing off resonance.
  CHECK(std::abs(r_far) < 0.005);
  CHECK(std::abs(r_far) < 0.2 * std::abs(r_near));
}

TEST_CASE("strong control opens transparency at resonance") {
  const TransmonQubit q = averaged_qubit();
  const double t_strong =
      std::abs(transmission(q, ControlDrive::resonant(q, mhz_to_angular(4000.0)), q.omega10));
  CHECK(t_strong > 0.999);
}

TEST_CASE("resonant transmission against the saturation formula") {
  const TransmonQubit q = averaged_qubit();
  const double Omega = mhz_to_angular(40.0);
  // Direct scalar evaluation of the on-resonance saturation curve.
  const double expected =
      1.0 - (q.Gamma10 / (2.0 * q.gamma10())) /
                (1.0 + Omega * Omega / (4.0 * q.gamma20 * q.gamma10()));
  CHECK(resonant_transmission(q, Omega) == doctest::Approx(expected).epsilon(1e-14));
  const auto t_full = transmission(q, ControlDrive::resonant(q, Omega), q.omega10);
  CHECK(std::abs(t_full.real() - expected) <= 1e-12 * std::abs(expected));
  CHECK(std::abs(t_full.imag()) < 1e-12);

  CHECK(resonant_transmission(q, 0.0) ==
        doctest::Approx(1.0 - q.Gamma10 / (2.0 * q.gamma10())).epsilon(1e-14));
  CHECK(resonant_transmission(q, mhz_to_angular(50000.0)) > 0.9999);
}

TEST_CASE("control power calibration values") {
  TransmonQubit q = averaged_qubit();
  const double omega_c = ghz_to_angular(7.533);

  CHECK(rabi_to_power(q, {omega_c, 0.0}) == 0.0);

  const double p = rabi_to_power(q, {omega_c, mhz_to_angular(40.0)});
  CHECK(p == doctest::Approx(1.0454e-15).epsilon(1e-3));
  CHECK(watts_to_dbm(p) == doctest::Approx(-119.81).epsilon(1e-3));

  const double Omega = power_to_rabi(q, dbm_to_watts(-124.0), omega_c);
  CHECK(angular_to_hz(Omega) == doctest::Approx(24.683e6).epsilon(1e-3));
}

TEST_CASE("calibration round trip across the drive range") {
  const TransmonQubit q = averaged_qubit();
  const double omega_c = q.omega21();
  for (double mhz = 0.5; mhz <= 200.0; mhz += 7.3) {
    const double Omega = mhz_to_angular(mhz);
    const double p = rabi_to_power(q, {omega_c, Omega});
    CHECK(std::abs(power_to_rabi(q, p, omega_c) - Omega) <= 1e-12 * Omega);
  }
  CHECK(power_to_rabi(q, rabi_to_power(q, {omega_c, 0.0}), omega_c) == 0.0);
}

TEST_CASE("control-off reduction to the two-level Lorentzian") {
  auto rng = test::seeded_rng(101);
  for (int i = 0; i < 1000; ++i) {
    const TransmonQubit q = test::random_passive_qubit(rng);
    const double omega = q.omega10 + mhz_to_angular(test::uniform(rng, -300.0, 300.0));
    const auto r = reflection(q, ControlDrive::off(), omega);
    const std::complex<double> lorentzian =
        -(0.5 * q.Gamma10) /
        std::complex<double>(q.gamma10(), -(omega - q.omega10));
    CHECK(std::abs(r - lorentzian) <= 1e-15 + 1e-12 * std::abs(lorentzian));
  }
}

TEST_CASE("passivity over random parameter draws") {
  auto rng = test::seeded_rng(102);
  for (int i = 0; i < 1000; ++i) {
    const TransmonQubit q = test::random_passive_qubit(rng);
    const ControlDrive drive{q.omega21() + mhz_to_angular(test::uniform(rng, -50.0, 50.0)),
                             mhz_to_angular(test::uniform(rng, 0.0, 120.0))};
    const double omega = q.omega10 + mhz_to_angular(test::uniform(rng, -400.0, 400.0));
    const auto r = reflection(q, drive, omega);
    const auto t = 1.0 + r;
    CHECK(std::norm(r) + std::norm(t) <= 1.0 + 1e-12);
    CHECK(std::abs(t) <= 1.0 + 1e-12);
  }
}

TEST_CASE("dressed-state splitting tracks the control strength") {
  const TransmonQubit q = averaged_qubit();
  for (double ratio : {4.0, 6.0, 8.0, 12.0}) {
    const double Omega = ratio * q.gamma10();
    const ControlDrive drive = ControlDrive::resonant(q, Omega);
    const double step = Omega / 16.0;
    const int half = 32;  // +-2 Omega
    std::vector<double> mag;
    for (int k = -half; k <= half; ++k) {
      mag.push_back(std::abs(transmission(q, drive, q.omega10 + step * k)));
    }
    std::vector<int> minima;
    for (int i = 1; i + 1 < static_cast<int>(mag.size()); ++i) {
      if (mag[i] < mag[i - 1] && mag[i] <= mag[i + 1]) minima.push_back(i);
    }
    REQUIRE(minima.size() == 2);
    const double separation = step * (minima[1] - minima[0]);
    CHECK(std::abs(separation - Omega) <= step);
  }
}

TEST_CASE("splitting calibration fit") {
  const TransmonQubit q = averaged_qubit();
  const double omega_c = q.omega21();
  const double a_true = 3.0e11;  // rad/s per sqrt(W)

  SUBCASE("noiseless recovery") {
    std::vector<SplittingPoint> pts;
    for (int i = 1; i <= 20; ++i) {
      const double p = 1e-16 * i;
      pts.push_back({p, a_true * std::sqrt(p)});
    }
    const CalibrationResult fit = fit_calibration_factor(pts, q, omega_c);
    CHECK(std::abs(fit.a - a_true) <= 1e-9 * a_true);
    // alpha by direct substitution.
    CHECK(fit.alpha ==
          doctest::Approx(a_true * a_true * kHbar * omega_c / (4.0 * q.Gamma10)).epsilon(1e-9));
  }

  SUBCASE("2 percent noise stays within 5 percent") {
    auto rng = test::seeded_rng(103);
    std::normal_distribution<double> gauss(0.0, 0.02);
    std::vector<SplittingPoint> pts;
    for (int i = 1; i <= 25; ++i) {
      const double p = 10.0e-16 * i;
      pts.push_back({p, a_true * std::sqrt(p) * (1.0 + gauss(rng))});
    }
    const CalibrationResult fit = fit_calibration_factor(pts, q, omega_c);
    CHECK(std::abs(fit.a - a_true) <= 0.05 * a_true);
  }

  SUBCASE("degenerate power axis fails") {
    std::vector<SplittingPoint> pts = {{1e-15, 1.0e8}, {1e-15, 1.1e8}, {1e-15, 0.9e8}};
    CHECK_THROWS_AS((void)fit_calibration_factor(pts, q, omega_c), FitFailureError);
  }
}

TEST_CASE("gamma20 extraction from the saturation curve") {
  const TransmonQubit q = averaged_qubit();
  const double omega_c = q.omega21();

  auto synth = [&](double noise_sigma, std::uint64_t seed) {
    auto rng = test::seeded_rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_sigma);
    std::vector<TransmissionPoint> pts;
    for (int i = 0; i < 30; ++i) {
      const double dbm = -135.0 + 25.0 * i / 29.0;
      const double p = dbm_to_watts(dbm);
      const double Omega = power_to_rabi(q, p, omega_c);
      pts.push_back({p, resonant_transmission(q, Omega) + gauss(rng)});
    }
    return pts;
  };

  SUBCASE("noiseless recovery to 1e-6") {
    const Gamma20Result fit = extract_gamma20(synth(0.0, 0), q);
    CHECK(std::abs(fit.gamma20 - q.gamma20) <= 1e-6 * q.gamma20);
  }

  SUBCASE("1 percent additive noise stays within 10 percent") {
    const Gamma20Result fit = extract_gamma20(synth(0.01, 104), q);
    CHECK(std::abs(fit.gamma20 - q.gamma20) <= 0.10 * q.gamma20);
  }

  SUBCASE("flat two-level curve is flagged") {
    std::vector<TransmissionPoint> flat;
    for (int i = 0; i < 30; ++i) {
      const double dbm = -135.0 + 25.0 * i / 29.0;
      flat.push_back({dbm_to_watts(dbm), 1.0 - q.Gamma10 / (2.0 * q.gamma10())});
    }
    CHECK_THROWS_AS((void)extract_gamma20(flat, q), FitFailureError);
  }

  SUBCASE("narrow power span is rejected") {
    std::vector<TransmissionPoint> pts = {{1e-16, 0.5}, {2e-16, 0.6}, {5e-16, 0.7}};
    CHECK_THROWS_AS((void)extract_gamma20(pts, q), InvalidParameterError);
  }
}

TEST_CASE("parameter validation and singular cases") {
  TransmonQubit q = averaged_qubit();

  SUBCASE("non-finite probe") {
    CHECK_THROWS_AS(
        (void)reflection(q, ControlDrive::off(), std::numeric_limits<double>::quiet_NaN()),
        InvalidParameterError);
  }
  SUBCASE("negative rate") {
    q.Gamma_nr = -1.0;
    CHECK_THROWS_AS((void)reflection(q, ControlDrive::off(), q.omega10), InvalidParameterError);
  }
  SUBCASE("undamped resonance is singular") {
    q.Gamma_nr = 0.0;
    q.Gamma10 = 0.0;
    q.gamma20 = 0.0;
    CHECK_THROWS_AS((void)reflection(q, ControlDrive::off(), q.omega10), SingularModelError);
  }
  SUBCASE("zero Gamma10 breaks the power calibration") {
    q.Gamma10 = 0.0;
    CHECK_THROWS_AS((void)rabi_to_power(q, {q.omega21(), mhz_to_angular(10.0)}),
                    SingularModelError);
  }
  SUBCASE("lossless three-level on resonance with control") {
    q.Gamma_nr = 0.0;
    q.gamma20 = 0.0;
    // Exactly transparent, not singular.
    const auto r = reflection(q, ControlDrive::resonant(q, mhz_to_angular(20.0)), q.omega10);
    CHECK(std::abs(r) == 0.0);
  }
}

TEST_CASE("consistency warnings on measured rows") {
  const Corpus corpus = builtin_corpus();
  const auto& table = corpus_set(corpus, "measured");
  // Q1: gamma20 = 8.7 > Gamma10 = 7.3, consistent.
  CHECK(table.qubits[0].to_qubit().consistency_warnings().empty());
  // Q2: gamma20 = 8.3 < Gamma10 = 9.5 with the default Gamma21 = 2 Gamma10.
  CHECK_FALSE(table.qubits[1].to_qubit().consistency_warnings().empty());
}

TEST_CASE("missing gamma20 needs an override") {
  const Corpus corpus = builtin_corpus();
  const auto& q3 = corpus_set(corpus, "measured").qubits[2];
  REQUIRE_FALSE(q3.has_gamma20());
  CHECK_THROWS_AS((void)q3.to_qubit(), InvalidParameterError);
  CHECK(q3.to_qubit(0.0).gamma20 == 0.0);
}
