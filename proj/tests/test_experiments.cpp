#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/experiments.hpp"
#include "slowlight/io.hpp"
#include "slowlight/units.hpp"
#include "test_support.hpp"

using namespace slowlight;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("slowlight_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

ExperimentConfig fast_ats_config(const std::string& tag) {
  ExperimentConfig config;
  config.drive.power_start_dBm = -128.0;
  config.drive.power_stop_dBm = -118.0;
  config.drive.power_step_dB = 2.0;
  config.probe.points = 1601;
  config.pulse.run_per_point = false;
  config.output_dir = temp_dir(tag);
  return config;
}

}  // namespace

TEST_CASE("config round trip through the manifest encoding") {
  ExperimentConfig config;
  config.parameter_set = "measured";
  config.chain.n_qubits = 5;
  config.drive.power_step_dB = 0.25;
  config.dispersion.f1_start_GHz = 7.81;
  config.seed = 42;
  config.noise_amplitude = 1e-4;
  const nlohmann::json j = config_to_json(config);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
}

TEST_CASE("unknown parameter set is a config error") {
  ExperimentConfig config = fast_ats_config("bad_set");
  config.parameter_set = "nonexistent";
  CHECK_THROWS_AS((void)run_ats_sweep(config), ConfigError);
}

TEST_CASE("band run finds one gap without drive and two with it") {
  ExperimentConfig config;
  config.band.omega_c_over_2pi_MHz = {0.0, 40.0};
  config.band.points = 3000;
  config.output_dir = temp_dir("band");
  const BandOutcome outcome = run_band(config);
  REQUIRE(outcome.bands.size() == 2);
  CHECK(outcome.bands[0].gap_intervals.size() == 1);
  CHECK(outcome.bands[1].gap_intervals.size() == 2);
  for (const auto& f : outcome.output_files) CHECK(fs::exists(f));
  const std::string band_csv = io::read_text_file(outcome.output_files.front());
  CHECK(band_csv.rfind("omega_Hz,re_kd,im_kd,branch,in_gap\n", 0) == 0);
}

TEST_CASE("ats sweep delays and splitting law") {
  ExperimentConfig config = fast_ats_config("ats_law");
  config.drive.power_start_dBm = -120.0;
  config.drive.power_stop_dBm = -112.0;
  config.drive.power_step_dB = 1.0;
  const SweepOutcome outcome = run_ats_sweep(config);

  // Strong-drive sector: dip separation follows Omega = a sqrt(P) within 2 %.
  double num = 0.0, den = 0.0;
  for (const auto& p : outcome.points) {
    REQUIRE(p.splitting.has_value());
    const double x = std::sqrt(dbm_to_watts(p.power_dBm));
    num += x * *p.splitting;
    den += x * x;
  }
  const double slope = num / den;
  for (const auto& p : outcome.points) {
    const double predicted = slope * std::sqrt(dbm_to_watts(p.power_dBm));
    CHECK(std::abs(*p.splitting - predicted) <= 0.02 * predicted);
    // And the separation tracks the calibrated Rabi strength itself.
    CHECK(std::abs(*p.splitting - p.Omega_c) <= 0.05 * p.Omega_c);
  }
}

TEST_CASE("ats sweep reproduces the delay maximum region") {
  ExperimentConfig config = fast_ats_config("ats_peak");
  config.drive.power_start_dBm = -130.0;
  config.drive.power_stop_dBm = -116.0;
  config.drive.power_step_dB = 1.0;
  config.probe.points = 2401;
  config.pulse.run_per_point = true;
  const SweepOutcome outcome = run_ats_sweep(config);
  double best_tau = -1e9, best_power = 0.0;
  for (const auto& p : outcome.points) {
    if (p.spectroscopic.tau > best_tau) {
      best_tau = p.spectroscopic.tau;
      best_power = p.power_dBm;
    }
  }
  CHECK(best_tau > 11.25e-9);
  CHECK(best_tau < 18.75e-9);
  CHECK(best_power > -127.0);
  CHECK(best_power < -121.0);

  // Pulsed and spectroscopic routes agree within 20 % wherever the delay is
  // appreciable.
  std::size_t compared = 0;
  for (const auto& p : outcome.points) {
    if (!p.pulse || p.spectroscopic.tau < 8e-9) continue;
    CHECK(std::abs(p.pulse->delay - p.spectroscopic.tau) <= 0.2 * p.spectroscopic.tau);
    ++compared;
  }
  CHECK(compared >= 5);
}

TEST_CASE("sweep outputs are byte-identical across thread counts") {
  ExperimentConfig config = fast_ats_config("det1");
  config.noise_amplitude = 1e-3;  // exercise the seeded-noise path
  config.threads = 1;
  run_ats_sweep(config);
  const std::string csv1 = io::read_text_file(config.output_dir + "/ats_sweep_s21.csv");
  const std::string json1 = io::read_text_file(config.output_dir + "/ats_sweep_delays.json");

  ExperimentConfig config2 = config;
  config2.output_dir = temp_dir("det2");
  config2.threads = 3;
  run_ats_sweep(config2);
  CHECK(io::read_text_file(config2.output_dir + "/ats_sweep_s21.csv") == csv1);
  CHECK(io::read_text_file(config2.output_dir + "/ats_sweep_delays.json") == json1);
  CHECK(csv1.rfind("control_power_dBm,frequency_Hz,re_S21,im_S21,abs_S21,arg_S21_rad\n", 0) == 0);
}

TEST_CASE("manifest reloads to an equivalent config") {
  ExperimentConfig config = fast_ats_config("manifest");
  run_ats_sweep(config);
  const auto manifest =
      nlohmann::json::parse(io::read_text_file(config.output_dir + "/run_manifest.json"));
  const ExperimentConfig reloaded = config_from_json(manifest.at("config"));
  CHECK(config_to_json(reloaded) == config_to_json(config));
  CHECK(manifest.at("experiment") == "ats-sweep");
}

TEST_CASE("dispersion sweep produces windows, delays, and subradiant structure") {
  ExperimentConfig config;
  config.dispersion.f1_start_GHz = 7.842;
  config.dispersion.f1_stop_GHz = 7.842;  // single point, detuning 40 MHz
  config.probe.points = 3201;
  config.pulse.run_per_point = true;
  config.output_dir = temp_dir("disp");
  const SweepOutcome outcome = run_dispersion_sweep(config);
  REQUIRE(outcome.points.size() == 1);
  const SweepPoint& p = outcome.points.front();

  CHECK(p.spectroscopic.tau > 5e-9);
  REQUIRE(p.window.has_value());
  CHECK(p.window->pulse_compatible);
  REQUIRE(p.pulse.has_value());
  // Wide window: the pulsed delay tracks the window-averaged phase slope.
  CHECK(std::abs(p.pulse->delay - p.spectroscopic.tau) <= 0.2 * p.spectroscopic.tau);
  CHECK(p.pulse->efficiency > 0.3);
  CHECK(p.pulse->efficiency <= 1.0);

  // Sharp collective peaks below both resonance groups, resolved with mild
  // broadening.
  const ExperimentContext ctx = make_context(config);
  ChainLayout chain = make_alternating_chain(ctx, 8, 7.842, 7.882);
  for (auto& q : chain.qubits) q.Gamma_nr = mhz_to_angular(0.05);
  for (double f_GHz : {7.842, 7.882}) {
    const FrequencyGrid zoom = FrequencyGrid::linspace(
        ghz_to_angular(f_GHz - 0.012), ghz_to_angular(f_GHz) - mhz_to_angular(0.05), 6000);
    const ComplexSpectrum s = chain_s21(chain, ControlDrive::off(), zoom);
    bool has_peak = false;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (std::abs(s.values[i]) > std::abs(s.values[i - 1]) &&
          std::abs(s.values[i]) > std::abs(s.values[i + 1]) &&
          std::abs(s.values[i]) > 0.5) {
        has_peak = true;
        break;
      }
    }
    CHECK(has_peak);
  }
}

TEST_CASE("frequency assignments") {
  SUBCASE("alternating pattern interleaves the two groups") {
    const FrequencyAssignment a = FrequencyAssignment::alternating(5, 7.85, 7.882);
    REQUIRE(a.size() == 5);
    CHECK(a.frequencies_GHz == std::vector<double>{7.85, 7.882, 7.85, 7.882, 7.85});
    a.validate();
  }
  SUBCASE("assignments retune the chain per position") {
    ExperimentConfig config;
    const ExperimentContext ctx = make_context(config);
    const ChainLayout chain =
        assign_frequencies(ctx, FrequencyAssignment::alternating(4, 7.85, 7.882));
    CHECK(chain.qubits[0].omega10 == ghz_to_angular(7.85));
    CHECK(chain.qubits[1].omega10 == ghz_to_angular(7.882));
    CHECK(chain.qubits[3].omega10 == ghz_to_angular(7.882));
  }
  SUBCASE("outside the tunable range is rejected") {
    CHECK_THROWS_AS(FrequencyAssignment::alternating(4, 8.5, 7.882).validate(), ConfigError);
    ExperimentConfig config;
    config.dispersion.f1_start_GHz = 8.5;
    config.dispersion.f1_stop_GHz = 8.5;
    config.output_dir = temp_dir("disp_bad");
    CHECK_THROWS_AS((void)run_dispersion_sweep(config), ConfigError);
  }
}

TEST_CASE("calibration run recovers the injected parameters") {
  SUBCASE("noiseless is exact") {
    ExperimentConfig config;
    config.parameter_set = "measured";
    config.calibration.qubit_label = "Q2";
    config.calibration.splitting_noise_relative = 0.0;
    config.calibration.transmission_noise = 0.0;
    config.output_dir = temp_dir("cal0");
    const CalibrationOutcome outcome = run_calibrate(config);
    CHECK(std::abs(outcome.alpha_fit - outcome.alpha_true) <= 1e-9 * outcome.alpha_true);
    CHECK(std::abs(outcome.gamma20_fit - outcome.gamma20_true) <= 1e-6 * outcome.gamma20_true);
  }

  SUBCASE("stock noise levels stay within tolerance") {
    ExperimentConfig config;
    config.parameter_set = "measured";
    config.calibration.qubit_label = "Q2";
    config.seed = 11;
    config.output_dir = temp_dir("cal1");
    const CalibrationOutcome outcome = run_calibrate(config);
    CHECK(std::abs(outcome.alpha_fit - outcome.alpha_true) <= 0.05 * outcome.alpha_true);
    CHECK(std::abs(outcome.gamma20_fit - outcome.gamma20_true) <= 0.10 * outcome.gamma20_true);
  }

  SUBCASE("qubits without gamma20 are rejected") {
    ExperimentConfig config;
    config.parameter_set = "measured";
    config.calibration.qubit_label = "Q3";
    config.output_dir = temp_dir("cal3");
    CHECK_THROWS_AS((void)run_calibrate(config), ConfigError);
  }
}

TEST_CASE("discrimination run classifies the stock line shape as a dip pair") {
  ExperimentConfig config;
  config.output_dir = temp_dir("disc");
  const DiscriminateOutcome outcome = run_discriminate(config);
  REQUIRE(outcome.comparison.valid);
  CHECK(outcome.comparison.ats_weight > 0.99);
  CHECK(fs::exists(config.output_dir + "/discriminate.json"));
}

TEST_CASE("single pulse run emits waveforms and a result record") {
  ExperimentConfig config;
  config.drive.power_start_dBm = -122.0;
  config.probe.points = 2401;
  config.output_dir = temp_dir("pulse");
  const PulseOutcome outcome = run_pulse(config);
  // The stock operating point: the window just fits the pulse bandwidth.
  CHECK(outcome.result.delay == doctest::Approx(12e-9).epsilon(0.25));
  CHECK(outcome.result.efficiency > 0.08);
  CHECK(outcome.result.efficiency < 0.24);
  for (const auto& f : outcome.output_files) CHECK(fs::exists(f));
  const auto j = nlohmann::json::parse(io::read_text_file(config.output_dir + "/pulse_result.json"));
  CHECK(j.contains("delay_s"));
  CHECK(j.contains("efficiency"));
  CHECK(j.contains("dbp"));
}

TEST_CASE("corpus file loading matches the built-in sets") {
  const Corpus from_file = load_corpus(std::string(SLOWLIGHT_SOURCE_DIR) + "/data/qubit_params.json");
  const Corpus builtin = builtin_corpus();
  REQUIRE(from_file.count("measured") == 1);
  REQUIRE(from_file.count("averages") == 1);
  const auto& file_q = from_file.at("measured").qubits;
  const auto& built_q = builtin.at("measured").qubits;
  REQUIRE(file_q.size() == built_q.size());
  for (std::size_t i = 0; i < file_q.size(); ++i) {
    CHECK(file_q[i].label == built_q[i].label);
    CHECK(file_q[i].Gamma10_over_2pi_MHz == built_q[i].Gamma10_over_2pi_MHz);
    CHECK(file_q[i].has_gamma20() == built_q[i].has_gamma20());
  }
}
