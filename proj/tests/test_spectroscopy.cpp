#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/spectroscopy.hpp"
#include "slowlight/transfer_matrix.hpp"
#include "slowlight/units.hpp"
#include "test_support.hpp"

using namespace slowlight;
using test::averaged_qubit;

namespace {

const PropagationMedium kMedium = PropagationMedium::calibrated();
constexpr double kSpacing = 400e-6;

ComplexSpectrum linear_phase_spectrum(const FrequencyGrid& grid, double tau) {
  std::vector<complexd> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = std::polar(1.0, grid[i] * tau);
  return ComplexSpectrum(grid, std::move(values));
}

ComplexSpectrum ats_chain_spectrum(double Omega_mhz, std::size_t n, const FrequencyGrid& grid) {
  const TransmonQubit q = averaged_qubit();
  const ChainLayout layout = ChainLayout::uniform(q, n, kSpacing, kMedium);
  const ControlDrive drive = ControlDrive::resonant(q, mhz_to_angular(Omega_mhz));
  return chain_s21(layout, drive, grid, LinePhase::removed);
}

}  // namespace

TEST_CASE("linear phase gives the exact delay") {
  const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                     mhz_to_angular(100.0), 801);
  const double tau = 10e-9;
  const ComplexSpectrum s = linear_phase_spectrum(grid, tau);
  const DelayEstimate est = phase_gradient_delay(s, 7, kSpacing, ghz_to_angular(7.812));
  CHECK(std::abs(est.tau - tau) <= 1e-9 * tau);

  const DelayEstimate averaged =
      phase_gradient_delay(s, 7, kSpacing, ghz_to_angular(7.812), mhz_to_angular(20.0));
  CHECK(std::abs(averaged.tau - tau) <= 1e-9 * tau);
}

TEST_CASE("group index pairs with the quoted delay") {
  const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                     mhz_to_angular(100.0), 801);
  const ComplexSpectrum s = linear_phase_spectrum(grid, 15.2e-9);
  const DelayEstimate est = phase_gradient_delay(s, 7, kSpacing, ghz_to_angular(7.812));
  // n_g = c0 tau / ((N-1) d) = 1898.7 for 15.2 ns across six 400 um cells.
  CHECK(est.group_index == doctest::Approx(1898.7).epsilon(1e-3));
  CHECK(est.group_index == doctest::Approx(1900.0).epsilon(0.01));
}

TEST_CASE("delay additivity for product spectra") {
  const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                     mhz_to_angular(200.0), 1601);
  const ComplexSpectrum sa = ats_chain_spectrum(40.0, 7, grid);
  const ComplexSpectrum sb = ats_chain_spectrum(60.0, 5, grid);
  std::vector<complexd> prod(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) prod[i] = sa.values[i] * sb.values[i];
  const ComplexSpectrum sab(grid, std::move(prod));

  const double omega = ghz_to_angular(7.812);
  const double da = phase_gradient_delay(sa, 7, kSpacing, omega).tau;
  const double db = phase_gradient_delay(sb, 7, kSpacing, omega).tau;
  const double dab = phase_gradient_delay(sab, 7, kSpacing, omega).tau;
  CHECK(std::abs(dab - (da + db)) <= 1e-9 * std::max(1e-12, std::abs(da + db)));
}

TEST_CASE("constant complex reference factors drop out") {
  const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                     mhz_to_angular(200.0), 1601);
  const ComplexSpectrum s = ats_chain_spectrum(40.0, 7, grid);
  std::vector<complexd> scaled(grid.size());
  const complexd factor = std::polar(0.37, 1.234);
  for (std::size_t i = 0; i < grid.size(); ++i) scaled[i] = factor * s.values[i];
  const ComplexSpectrum s2(grid, std::move(scaled));

  const double omega = ghz_to_angular(7.812);
  CHECK(phase_gradient_delay(s, 7, kSpacing, omega).tau ==
        doctest::Approx(phase_gradient_delay(s2, 7, kSpacing, omega).tau).epsilon(1e-9));
  const TransparencyWindow wa = window_metrics(s);
  const TransparencyWindow wb = window_metrics(s2);
  CHECK(wa.bandwidth == doctest::Approx(wb.bandwidth).epsilon(1e-12));
  CHECK(wa.center == doctest::Approx(wb.center).epsilon(1e-12));
}

TEST_CASE("averaged slope converges to the central difference") {
  const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                     mhz_to_angular(200.0), 3201);
  const ComplexSpectrum s = ats_chain_spectrum(40.0, 7, grid);
  const double omega = ghz_to_angular(7.812);
  const double central = phase_gradient_delay(s, 7, kSpacing, omega).tau;
  double previous_error = 1e9;
  for (double b_mhz : {8.0, 4.0, 2.0, 1.0}) {
    const double averaged =
        phase_gradient_delay(s, 7, kSpacing, omega, mhz_to_angular(b_mhz)).tau;
    const double error = std::abs(averaged - central);
    CHECK(error <= previous_error + 1e-15);
    previous_error = error;
  }
  CHECK(previous_error <= 0.02 * std::abs(central));
}

TEST_CASE("unwrap rejects unresolvable jumps") {
  // Two samples pi apart in phase cannot be unwrapped unambiguously.
  const FrequencyGrid grid = FrequencyGrid::linspace(1.0, 3.0, 3);
  std::vector<complexd> values = {{1.0, 0.0}, {-1.0, 1e-12}, {1.0, 0.0}};
  const ComplexSpectrum s(grid, values);
  CHECK_THROWS_AS((void)unwrap_phase(s), GridError);
}

TEST_CASE("window metrics") {
  SUBCASE("flat spectrum has no window") {
    const FrequencyGrid grid = FrequencyGrid::linspace(1.0, 2.0, 64);
    CHECK_THROWS_AS((void)window_metrics(ComplexSpectrum::constant(grid, 0.7)),
                    StructureNotFoundError);
  }

  SUBCASE("symmetric dip pair centers the window at the midpoint") {
    const double center = ghz_to_angular(7.812);
    const FrequencyGrid grid = FrequencyGrid::centered(center, mhz_to_angular(200.0), 2001);
    std::vector<double> mag(grid.size());
    std::vector<complexd> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double dm = mhz_to_angular(25.0);
      const double w1 = mhz_to_angular(8.0);
      auto dip = [&](double c) {
        return 0.8 * w1 * w1 / ((grid[i] - c) * (grid[i] - c) + w1 * w1);
      };
      values[i] = 1.0 - dip(center - dm) - dip(center + dm);
    }
    const TransparencyWindow window = window_metrics(ComplexSpectrum(grid, values));
    CHECK(std::abs(window.center - center) <= mhz_to_angular(0.2));
    CHECK(window.peak_transmission < 1.0);
    CHECK(window.bandwidth > 0.0);
  }

  SUBCASE("collective transparency window passes the pulse-bandwidth gate") {
    const FrequencyGrid grid = FrequencyGrid::centered(ghz_to_angular(7.812),
                                                       mhz_to_angular(500.0), 4001);
    const ComplexSpectrum s = ats_chain_spectrum(40.0, 7, grid);
    const TransparencyWindow window =
        window_metrics(s, 0.5, kTwoPi / 50e-9);  // 20 MHz for sigma = 50 ns
    // The window top carries weak collective ripples; the highest local
    // maximum can sit a few MHz off the exact midpoint.
    CHECK(std::abs(window.center - ghz_to_angular(7.812)) <= mhz_to_angular(5.0));
    CHECK(window.bandwidth >= kTwoPi * 20e6);
    CHECK(window.pulse_compatible);
  }

  SUBCASE("threshold fraction is validated") {
    const FrequencyGrid grid = FrequencyGrid::linspace(1.0, 2.0, 64);
    CHECK_THROWS_AS((void)window_metrics(ComplexSpectrum::constant(grid, 0.7), 1.5),
                    InvalidParameterError);
  }
}

TEST_CASE("line-shape discrimination") {
  const double center = ghz_to_angular(7.812);
  const FrequencyGrid grid = FrequencyGrid::centered(center, mhz_to_angular(400.0), 801);

  SUBCASE("self-consistency on the dip-pair model") {
    std::vector<double> y(grid.size());
    const std::vector<double> p = {0.7, center - mhz_to_angular(20.0), mhz_to_angular(9.0),
                                   0.7, center + mhz_to_angular(20.0), mhz_to_angular(9.0)};
    for (std::size_t i = 0; i < grid.size(); ++i) y[i] = ats_line_shape(grid[i], p);
    const ModelComparison cmp = aic_discriminate(grid, y);
    REQUIRE(cmp.valid);
    CHECK(cmp.ats_weight > 0.999);
  }

  SUBCASE("self-consistency on the interference model") {
    std::vector<double> y(grid.size());
    const std::vector<double> p = {0.9, center, mhz_to_angular(30.0),
                                   0.6, center, mhz_to_angular(5.0)};
    for (std::size_t i = 0; i < grid.size(); ++i) y[i] = eit_line_shape(grid[i], p);
    const ModelComparison cmp = aic_discriminate(grid, y);
    REQUIRE(cmp.valid);
    CHECK(cmp.eit_weight > 0.999);
  }

  SUBCASE("measured-rate dressed line shape classifies as a dip pair") {
    const TransmonQubit q = averaged_qubit();
    const ControlDrive drive = ControlDrive::resonant(q, mhz_to_angular(40.0));
    std::vector<double> y(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      y[i] = std::abs(transmission(q, drive, grid[i]));
    }
    const ModelComparison cmp = aic_discriminate(grid, y);
    REQUIRE(cmp.valid);
    CHECK(cmp.ats_weight > 0.99);
  }

  SUBCASE("nearly lossless dark state classifies as interference") {
    TransmonQubit q = averaged_qubit();
    q.gamma20 = mhz_to_angular(0.01);
    const ControlDrive drive = ControlDrive::resonant(q, mhz_to_angular(4.0));
    std::vector<double> y(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      y[i] = std::abs(transmission(q, drive, grid[i]));
    }
    const ModelComparison cmp = aic_discriminate(grid, y);
    REQUIRE(cmp.valid);
    CHECK(cmp.eit_weight > 0.5);
  }

  SUBCASE("weights stay normalized under noise") {
    const TransmonQubit q = averaged_qubit();
    const ControlDrive drive = ControlDrive::resonant(q, mhz_to_angular(40.0));
    std::vector<double> clean(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      clean[i] = std::abs(transmission(q, drive, grid[i]));
    }
    const double clean_ats = aic_discriminate(grid, clean).ats_weight;

    auto rng = test::seeded_rng(404);
    std::normal_distribution<double> gauss(0.0, 0.05);
    std::vector<double> noisy = clean;
    for (auto& v : noisy) v += gauss(rng);
    const ModelComparison cmp = aic_discriminate(grid, noisy);
    REQUIRE(cmp.valid);
    CHECK(cmp.ats_weight >= 0.0);
    CHECK(cmp.ats_weight <= 1.0);
    CHECK(cmp.ats_weight + cmp.eit_weight == doctest::Approx(1.0).epsilon(1e-9));
    // Heavy noise can only blur the verdict.
    CHECK(cmp.ats_weight <= clean_ats + 1e-9);
  }

  SUBCASE("non-uniform grids are rejected") {
    std::vector<double> omegas = {1.0, 2.0, 4.0, 8.0, 16.0, 17.0, 18.0, 19.0,
                                  20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 27.0};
    std::vector<double> y(omegas.size(), 1.0);
    CHECK_THROWS_AS((void)aic_discriminate(FrequencyGrid(omegas), y), GridError);
  }
}
