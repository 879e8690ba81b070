#include "slowlight/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "slowlight/errors.hpp"
#include "slowlight/io.hpp"
#include "slowlight/kernels.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

using nlohmann::json;

constexpr double kTunableMinGHz = 3.0;
constexpr double kTunableMaxGHz = 8.0;

std::vector<double> power_axis(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw ConfigError("bad power sweep range");
  std::vector<double> out;
  for (double p = start; p <= stop + 1e-9; p += step) out.push_back(p);
  return out;
}

void run_parallel(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(count == 0 ? 1 : count));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Seeded per sweep point so results do not depend on scheduling.
void add_noise(ComplexSpectrum& spectrum, double amplitude, std::uint64_t seed,
               std::size_t index) {
  if (amplitude <= 0.0) return;
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  std::normal_distribution<double> gauss(0.0, amplitude);
  for (auto& v : spectrum.values) v += complexd{gauss(rng), gauss(rng)};
}

double mean_Gamma10(const ChainLayout& layout) {
  double sum = 0.0;
  for (const auto& q : layout.qubits) sum += q.Gamma10;
  return sum / static_cast<double>(layout.size());
}

std::optional<double> dip_splitting(const ComplexSpectrum& spectrum) {
  std::vector<double> mag(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) mag[i] = std::abs(spectrum.values[i]);
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < mag.size(); ++i) {
    if (mag[i] < mag[i - 1] && mag[i] <= mag[i + 1]) minima.push_back(i);
  }
  if (minima.size() < 2) return std::nullopt;
  std::sort(minima.begin(), minima.end(),
            [&](std::size_t a, std::size_t b) { return mag[a] < mag[b]; });
  const double w1 = spectrum.grid[minima[0]];
  const double w2 = spectrum.grid[minima[1]];
  return std::abs(w2 - w1);
}

json sweep_point_json(const SweepPoint& p, bool dispersion) {
  json j{{"Omega_c_over_2pi_Hz", angular_to_hz(p.Omega_c)},
         {"tau_spectroscopic", io::to_json(p.spectroscopic)}};
  if (dispersion) {
    j["f1_GHz"] = p.f1_GHz;
  } else {
    j["control_power_dBm"] = p.power_dBm;
  }
  if (p.window) j["window"] = io::to_json(*p.window);
  if (p.splitting) j["splitting_Hz"] = angular_to_hz(*p.splitting);
  if (p.pulse) j["pulse"] = io::to_json(*p.pulse);
  return j;
}

void append_sweep_csv(std::ostringstream& out, const std::string& axis_value,
                      const ComplexSpectrum& spectrum) {
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const complexd v = spectrum.values[i];
    out << axis_value << ',' << io::format_double(angular_to_hz(spectrum.grid[i])) << ','
        << io::format_double(v.real()) << ',' << io::format_double(v.imag()) << ','
        << io::format_double(std::abs(v)) << ',' << io::format_double(std::arg(v)) << '\n';
  }
}

void write_manifest(const ExperimentConfig& config, const std::string& experiment,
                    std::vector<std::string>& outputs) {
  json manifest{{"tool", "slowlight"},
                {"experiment", experiment},
                {"kernel_backend", kernels::backend_name(kernels::active_backend())},
                {"config", config_to_json(config)},
                {"outputs", outputs}};
  const std::string path = config.output_dir + "/run_manifest.json";
  io::write_json_file(path, manifest);
  outputs.push_back(path);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.parameter_set = j.value("parameter_set", c.parameter_set);
  c.corpus_file = j.value("corpus_file", c.corpus_file);
  if (j.contains("chain")) {
    const auto& s = j.at("chain");
    c.chain.n_qubits = s.value("n_qubits", c.chain.n_qubits);
    c.chain.spacing_m = s.value("spacing_m", c.chain.spacing_m);
    c.chain.phase_velocity_m_s = s.value("phase_velocity_m_s", c.chain.phase_velocity_m_s);
    c.chain.resonance_GHz = s.value("resonance_GHz", c.chain.resonance_GHz);
  }
  if (j.contains("probe")) {
    const auto& s = j.at("probe");
    c.probe.span_MHz = s.value("span_MHz", c.probe.span_MHz);
    c.probe.points = s.value("points", c.probe.points);
  }
  if (j.contains("drive")) {
    const auto& s = j.at("drive");
    c.drive.control_frequency_GHz = s.value("control_frequency_GHz", c.drive.control_frequency_GHz);
    c.drive.power_start_dBm = s.value("power_start_dBm", c.drive.power_start_dBm);
    c.drive.power_stop_dBm = s.value("power_stop_dBm", c.drive.power_stop_dBm);
    c.drive.power_step_dB = s.value("power_step_dB", c.drive.power_step_dB);
  }
  if (j.contains("band")) {
    const auto& s = j.at("band");
    c.band.omega_c_over_2pi_MHz =
        s.value("omega_c_over_2pi_MHz", c.band.omega_c_over_2pi_MHz);
    c.band.span_MHz = s.value("span_MHz", c.band.span_MHz);
    c.band.points = s.value("points", c.band.points);
  }
  if (j.contains("dispersion")) {
    const auto& s = j.at("dispersion");
    c.dispersion.n_qubits = s.value("n_qubits", c.dispersion.n_qubits);
    c.dispersion.f2_GHz = s.value("f2_GHz", c.dispersion.f2_GHz);
    c.dispersion.f1_start_GHz = s.value("f1_start_GHz", c.dispersion.f1_start_GHz);
    c.dispersion.f1_stop_GHz = s.value("f1_stop_GHz", c.dispersion.f1_stop_GHz);
    c.dispersion.f1_step_MHz = s.value("f1_step_MHz", c.dispersion.f1_step_MHz);
  }
  if (j.contains("pulse")) {
    const auto& s = j.at("pulse");
    c.pulse.sigma_ns = s.value("sigma_ns", c.pulse.sigma_ns);
    c.pulse.sample_rate_GSps = s.value("sample_rate_GSps", c.pulse.sample_rate_GSps);
    c.pulse.window_us = s.value("window_us", c.pulse.window_us);
    c.pulse.run_per_point = s.value("run_per_point", c.pulse.run_per_point);
    c.pulse.reference_detuning_GHz =
        s.value("reference_detuning_GHz", c.pulse.reference_detuning_GHz);
  }
  if (j.contains("heterodyne")) {
    const auto& s = j.at("heterodyne");
    c.heterodyne.if_MHz = s.value("if_MHz", c.heterodyne.if_MHz);
    c.heterodyne.filter_order = s.value("filter_order", c.heterodyne.filter_order);
    c.heterodyne.cutoff_MHz = s.value("cutoff_MHz", c.heterodyne.cutoff_MHz);
  }
  if (j.contains("analysis")) {
    const auto& s = j.at("analysis");
    c.analysis.ats_averaging_MHz = s.value("ats_averaging_MHz", c.analysis.ats_averaging_MHz);
    c.analysis.dispersion_averaging_MHz =
        s.value("dispersion_averaging_MHz", c.analysis.dispersion_averaging_MHz);
    c.analysis.window_threshold_fraction =
        s.value("window_threshold_fraction", c.analysis.window_threshold_fraction);
  }
  if (j.contains("calibration")) {
    const auto& s = j.at("calibration");
    c.calibration.qubit_label = s.value("qubit_label", c.calibration.qubit_label);
    c.calibration.alpha = s.value("alpha", c.calibration.alpha);
    c.calibration.power_start_dBm = s.value("power_start_dBm", c.calibration.power_start_dBm);
    c.calibration.power_stop_dBm = s.value("power_stop_dBm", c.calibration.power_stop_dBm);
    c.calibration.points = s.value("points", c.calibration.points);
    c.calibration.splitting_noise_relative =
        s.value("splitting_noise_relative", c.calibration.splitting_noise_relative);
    c.calibration.transmission_noise =
        s.value("transmission_noise", c.calibration.transmission_noise);
  }
  if (j.contains("discriminate")) {
    const auto& s = j.at("discriminate");
    c.discriminate.Omega_c_over_2pi_MHz =
        s.value("Omega_c_over_2pi_MHz", c.discriminate.Omega_c_over_2pi_MHz);
    c.discriminate.span_MHz = s.value("span_MHz", c.discriminate.span_MHz);
    c.discriminate.points = s.value("points", c.discriminate.points);
  }
  c.noise_amplitude = j.value("noise_amplitude", c.noise_amplitude);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return json{
      {"parameter_set", c.parameter_set},
      {"corpus_file", c.corpus_file},
      {"chain",
       {{"n_qubits", c.chain.n_qubits},
        {"spacing_m", c.chain.spacing_m},
        {"phase_velocity_m_s", c.chain.phase_velocity_m_s},
        {"resonance_GHz", c.chain.resonance_GHz}}},
      {"probe", {{"span_MHz", c.probe.span_MHz}, {"points", c.probe.points}}},
      {"drive",
       {{"control_frequency_GHz", c.drive.control_frequency_GHz},
        {"power_start_dBm", c.drive.power_start_dBm},
        {"power_stop_dBm", c.drive.power_stop_dBm},
        {"power_step_dB", c.drive.power_step_dB}}},
      {"band",
       {{"omega_c_over_2pi_MHz", c.band.omega_c_over_2pi_MHz},
        {"span_MHz", c.band.span_MHz},
        {"points", c.band.points}}},
      {"dispersion",
       {{"n_qubits", c.dispersion.n_qubits},
        {"f2_GHz", c.dispersion.f2_GHz},
        {"f1_start_GHz", c.dispersion.f1_start_GHz},
        {"f1_stop_GHz", c.dispersion.f1_stop_GHz},
        {"f1_step_MHz", c.dispersion.f1_step_MHz}}},
      {"pulse",
       {{"sigma_ns", c.pulse.sigma_ns},
        {"sample_rate_GSps", c.pulse.sample_rate_GSps},
        {"window_us", c.pulse.window_us},
        {"run_per_point", c.pulse.run_per_point},
        {"reference_detuning_GHz", c.pulse.reference_detuning_GHz}}},
      {"heterodyne",
       {{"if_MHz", c.heterodyne.if_MHz},
        {"filter_order", c.heterodyne.filter_order},
        {"cutoff_MHz", c.heterodyne.cutoff_MHz}}},
      {"analysis",
       {{"ats_averaging_MHz", c.analysis.ats_averaging_MHz},
        {"dispersion_averaging_MHz", c.analysis.dispersion_averaging_MHz},
        {"window_threshold_fraction", c.analysis.window_threshold_fraction}}},
      {"calibration",
       {{"qubit_label", c.calibration.qubit_label},
        {"alpha", c.calibration.alpha},
        {"power_start_dBm", c.calibration.power_start_dBm},
        {"power_stop_dBm", c.calibration.power_stop_dBm},
        {"points", c.calibration.points},
        {"splitting_noise_relative", c.calibration.splitting_noise_relative},
        {"transmission_noise", c.calibration.transmission_noise}}},
      {"discriminate",
       {{"Omega_c_over_2pi_MHz", c.discriminate.Omega_c_over_2pi_MHz},
        {"span_MHz", c.discriminate.span_MHz},
        {"points", c.discriminate.points}}},
      {"noise_amplitude", c.noise_amplitude},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ExperimentContext make_context(const ExperimentConfig& config) {
  ExperimentContext ctx;
  ctx.config = config;
  const Corpus corpus =
      config.corpus_file.empty() ? builtin_corpus() : load_corpus(config.corpus_file);
  ctx.set = corpus_set(corpus, config.parameter_set);
  ctx.medium = config.chain.phase_velocity_m_s > 0.0
                   ? PropagationMedium{config.chain.phase_velocity_m_s}
                   : PropagationMedium::calibrated();
  ctx.medium.validate();
  ctx.omega_resonance = ghz_to_angular(config.chain.resonance_GHz);
  ctx.omega_control = ghz_to_angular(config.drive.control_frequency_GHz);
  if (config.probe.points < 8) throw ConfigError("probe.points too small");
  return ctx;
}

ChainLayout make_resonant_chain(const ExperimentContext& ctx, std::size_t n, double omega) {
  if (n == 0) throw ConfigError("chain needs at least one qubit");
  ChainLayout layout;
  layout.spacing = ctx.config.chain.spacing_m;
  layout.medium = ctx.medium;
  for (std::size_t i = 0; i < n; ++i) {
    const QubitRecord& rec = ctx.set.qubits[i % ctx.set.qubits.size()];
    TransmonQubit q = rec.has_gamma20() ? rec.to_qubit() : rec.to_qubit(0.0);
    layout.qubits.push_back(q.tuned_to(omega));
  }
  layout.validate();
  return layout;
}

FrequencyAssignment FrequencyAssignment::common(std::size_t n, double f_GHz) {
  return {std::vector<double>(n, f_GHz)};
}

FrequencyAssignment FrequencyAssignment::alternating(std::size_t n, double f1_GHz,
                                                     double f2_GHz) {
  FrequencyAssignment assignment{std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    assignment.frequencies_GHz[i] = (i % 2 == 0) ? f1_GHz : f2_GHz;
  }
  return assignment;
}

void FrequencyAssignment::validate() const {
  if (frequencies_GHz.empty()) throw ConfigError("frequency assignment is empty");
  for (double f : frequencies_GHz) {
    if (!(f >= kTunableMinGHz && f <= kTunableMaxGHz)) {
      throw ConfigError("frequency assignment outside the 3-8 GHz tunability range");
    }
  }
}

ChainLayout assign_frequencies(const ExperimentContext& ctx,
                               const FrequencyAssignment& assignment) {
  assignment.validate();
  ChainLayout layout =
      make_resonant_chain(ctx, assignment.size(), ghz_to_angular(assignment.frequencies_GHz[0]));
  for (std::size_t i = 0; i < layout.qubits.size(); ++i) {
    layout.qubits[i] = layout.qubits[i].tuned_to(ghz_to_angular(assignment.frequencies_GHz[i]));
  }
  return layout;
}

ChainLayout make_alternating_chain(const ExperimentContext& ctx, std::size_t n, double f1_GHz,
                                   double f2_GHz) {
  return assign_frequencies(ctx, FrequencyAssignment::alternating(n, f1_GHz, f2_GHz));
}

PulseResult pulse_through(const ExperimentContext& ctx, const ChainLayout& layout,
                          const ControlDrive& drive, double carrier,
                          const FrequencyGrid& grid) {
  const auto& pc = ctx.config.pulse;
  PulseSpec spec{pc.sigma_ns * 1e-9, carrier, 1.0};
  const Waveform input =
      synthesize_pulse(spec, pc.sample_rate_GSps * 1e9, pc.window_us * 1e-6);

  const ComplexSpectrum s21 = chain_s21(layout, drive, grid, LinePhase::include);

  ChainLayout detuned = layout;
  const double detuning = ghz_to_angular(pc.reference_detuning_GHz);
  for (auto& q : detuned.qubits) q = q.detuned_by(detuning);
  const ComplexSpectrum s21_ref = chain_s21(detuned, drive, grid, LinePhase::include);

  const HeterodyneSettings het{ctx.config.heterodyne.if_MHz * 1e6,
                               ctx.config.heterodyne.filter_order,
                               ctx.config.heterodyne.cutoff_MHz * 1e6};
  const Waveform transmitted = heterodyne_chain(propagate(input, s21), het).waveform;
  const Waveform reference = heterodyne_chain(propagate(input, s21_ref), het).waveform;
  return fit_arrival(transmitted, reference);
}

SweepOutcome run_ats_sweep(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const ChainLayout layout =
      make_resonant_chain(ctx, config.chain.n_qubits, ctx.omega_resonance);
  const FrequencyGrid grid = FrequencyGrid::centered(
      ctx.omega_resonance, mhz_to_angular(config.probe.span_MHz), config.probe.points);
  const std::vector<double> powers = power_axis(
      config.drive.power_start_dBm, config.drive.power_stop_dBm, config.drive.power_step_dB);

  // Power -> Rabi conversion uses the ensemble radiative rate.
  TransmonQubit mean_qubit = layout.qubits.front();
  mean_qubit.Gamma10 = mean_Gamma10(layout);

  const double pulse_bandwidth = kTwoPi / (config.pulse.sigma_ns * 1e-9);

  SweepOutcome outcome;
  outcome.points.resize(powers.size());
  std::vector<ComplexSpectrum> spectra(powers.size(), ComplexSpectrum::constant(grid, 0.0));

  run_parallel(powers.size(), config.threads, [&](std::size_t i) {
    SweepPoint point;
    point.power_dBm = powers[i];
    point.Omega_c =
        power_to_rabi(mean_qubit, dbm_to_watts(powers[i]), ctx.omega_control);
    const ControlDrive drive{ctx.omega_control, point.Omega_c};

    ComplexSpectrum s_rel = chain_s21(layout, drive, grid, LinePhase::removed);
    add_noise(s_rel, config.noise_amplitude, config.seed, i);
    point.spectroscopic =
        phase_gradient_delay(s_rel, layout.size(), layout.spacing, ctx.omega_resonance,
                             mhz_to_angular(config.analysis.ats_averaging_MHz));
    try {
      point.window = window_metrics(s_rel, config.analysis.window_threshold_fraction,
                                    pulse_bandwidth);
    } catch (const StructureNotFoundError&) {
      point.window.reset();
    }
    point.splitting = dip_splitting(s_rel);
    if (config.pulse.run_per_point) {
      point.pulse = pulse_through(ctx, layout, drive, ctx.omega_resonance, grid);
    }
    outcome.points[i] = std::move(point);
    spectra[i] = std::move(s_rel);
  });

  std::ostringstream csv;
  csv << "control_power_dBm,frequency_Hz,re_S21,im_S21,abs_S21,arg_S21_rad\n";
  json delays = json::array();
  for (std::size_t i = 0; i < powers.size(); ++i) {
    append_sweep_csv(csv, io::format_double(powers[i]), spectra[i]);
    delays.push_back(sweep_point_json(outcome.points[i], false));
  }

  const std::string csv_path = config.output_dir + "/ats_sweep_s21.csv";
  const std::string json_path = config.output_dir + "/ats_sweep_delays.json";
  io::write_text_file(csv_path, csv.str());
  io::write_json_file(json_path, delays);
  outcome.output_files = {csv_path, json_path};
  write_manifest(config, "ats-sweep", outcome.output_files);
  return outcome;
}

SweepOutcome run_dispersion_sweep(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const auto& disp = config.dispersion;
  if (!(disp.f1_step_MHz > 0.0) || disp.f1_stop_GHz < disp.f1_start_GHz) {
    throw ConfigError("bad dispersion f1 sweep range");
  }
  std::vector<double> f1_list;
  for (double f1 = disp.f1_start_GHz; f1 <= disp.f1_stop_GHz + 1e-12;
       f1 += disp.f1_step_MHz * 1e-3) {
    f1_list.push_back(f1);
  }

  const double pulse_bandwidth = kTwoPi / (config.pulse.sigma_ns * 1e-9);

  SweepOutcome outcome;
  outcome.points.resize(f1_list.size());
  std::vector<ComplexSpectrum> spectra;
  spectra.reserve(f1_list.size());
  for (std::size_t i = 0; i < f1_list.size(); ++i) {
    const double carrier = ghz_to_angular(0.5 * (f1_list[i] + disp.f2_GHz));
    spectra.emplace_back(ComplexSpectrum::constant(
        FrequencyGrid::centered(carrier, mhz_to_angular(config.probe.span_MHz),
                                config.probe.points),
        0.0));
  }

  run_parallel(f1_list.size(), config.threads, [&](std::size_t i) {
    const double f1 = f1_list[i];
    const ChainLayout layout = make_alternating_chain(ctx, disp.n_qubits, f1, disp.f2_GHz);
    const double carrier = ghz_to_angular(0.5 * (f1 + disp.f2_GHz));
    const FrequencyGrid& grid = spectra[i].grid;
    const ControlDrive drive = ControlDrive::off();

    SweepPoint point;
    point.f1_GHz = f1;
    point.Omega_c = 0.0;

    ComplexSpectrum s_rel = chain_s21(layout, drive, grid, LinePhase::removed);
    add_noise(s_rel, config.noise_amplitude, config.seed, i);
    point.spectroscopic =
        phase_gradient_delay(s_rel, layout.size(), layout.spacing, carrier,
                             mhz_to_angular(config.analysis.dispersion_averaging_MHz));
    try {
      point.window = window_metrics(s_rel, config.analysis.window_threshold_fraction,
                                    pulse_bandwidth);
    } catch (const StructureNotFoundError&) {
      point.window.reset();
    }
    point.splitting = dip_splitting(s_rel);
    if (config.pulse.run_per_point) {
      point.pulse = pulse_through(ctx, layout, drive, carrier, grid);
    }
    outcome.points[i] = std::move(point);
    spectra[i] = std::move(s_rel);
  });

  std::ostringstream csv;
  csv << "f1_Hz,frequency_Hz,re_S21,im_S21,abs_S21,arg_S21_rad\n";
  json delays = json::array();
  for (std::size_t i = 0; i < f1_list.size(); ++i) {
    append_sweep_csv(csv, io::format_double(f1_list[i] * 1e9), spectra[i]);
    delays.push_back(sweep_point_json(outcome.points[i], true));
  }

  const std::string csv_path = config.output_dir + "/dispersion_sweep_s21.csv";
  const std::string json_path = config.output_dir + "/dispersion_sweep_delays.json";
  io::write_text_file(csv_path, csv.str());
  io::write_json_file(json_path, delays);
  outcome.output_files = {csv_path, json_path};
  write_manifest(config, "dispersion-sweep", outcome.output_files);
  return outcome;
}

BandOutcome run_band(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const QubitRecord& rec = ctx.set.qubits.front();
  const TransmonQubit qubit =
      (rec.has_gamma20() ? rec.to_qubit() : rec.to_qubit(0.0)).tuned_to(ctx.omega_resonance);

  // Even point count keeps the exact (lossless-singular) resonance off the grid.
  std::size_t points = config.band.points;
  if (points % 2 == 1) ++points;
  const FrequencyGrid grid = FrequencyGrid::centered(
      ctx.omega_resonance, mhz_to_angular(config.band.span_MHz), points);

  std::vector<double> omegas;
  for (double mhz : config.band.omega_c_over_2pi_MHz) omegas.push_back(mhz_to_angular(mhz));

  BandOutcome outcome;
  outcome.bands =
      lossless_bands(qubit, omegas, grid, config.chain.spacing_m, ctx.medium);

  json summary = json::array();
  for (std::size_t i = 0; i < outcome.bands.size(); ++i) {
    const auto& band = outcome.bands[i];
    std::ostringstream name;
    name << config.output_dir << "/band_Omega_"
         << io::format_double(config.band.omega_c_over_2pi_MHz[i]) << "MHz.csv";
    io::write_text_file(name.str(), io::bloch_csv(band.solution));
    outcome.output_files.push_back(name.str());

    json entry{{"Omega_c_over_2pi_MHz", config.band.omega_c_over_2pi_MHz[i]},
               {"gap_intervals_Hz", json::array()}};
    for (const auto& [lo, hi] : band.gap_intervals) {
      entry["gap_intervals_Hz"].push_back({angular_to_hz(lo), angular_to_hz(hi)});
    }
    // Center-band delay from the same Bloch solution, where a band exists.
    if (band.Omega_c > 0.0) {
      const DelayEstimate delay = group_delay_numeric(
          band.solution, config.chain.n_qubits, config.chain.spacing_m, ctx.omega_resonance);
      entry["center_band_delay"] = io::to_json(delay);
    }
    summary.push_back(entry);
  }
  const std::string summary_path = config.output_dir + "/band_summary.json";
  io::write_json_file(summary_path, summary);
  outcome.output_files.push_back(summary_path);
  write_manifest(config, "band", outcome.output_files);
  return outcome;
}

PulseOutcome run_pulse(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const ChainLayout layout =
      make_resonant_chain(ctx, config.chain.n_qubits, ctx.omega_resonance);
  const FrequencyGrid grid = FrequencyGrid::centered(
      ctx.omega_resonance, mhz_to_angular(config.probe.span_MHz), config.probe.points);

  TransmonQubit mean_qubit = layout.qubits.front();
  mean_qubit.Gamma10 = mean_Gamma10(layout);
  const double Omega =
      power_to_rabi(mean_qubit, dbm_to_watts(config.drive.power_start_dBm), ctx.omega_control);
  const ControlDrive drive{ctx.omega_control, Omega};

  const auto& pc = config.pulse;
  PulseSpec spec{pc.sigma_ns * 1e-9, ctx.omega_resonance, 1.0};
  const Waveform input =
      synthesize_pulse(spec, pc.sample_rate_GSps * 1e9, pc.window_us * 1e-6);
  const ComplexSpectrum s21 = chain_s21(layout, drive, grid, LinePhase::include);
  ChainLayout detuned = layout;
  for (auto& q : detuned.qubits) q = q.detuned_by(ghz_to_angular(pc.reference_detuning_GHz));
  const ComplexSpectrum s21_ref = chain_s21(detuned, drive, grid, LinePhase::include);

  const HeterodyneSettings het{config.heterodyne.if_MHz * 1e6, config.heterodyne.filter_order,
                               config.heterodyne.cutoff_MHz * 1e6};
  const Waveform transmitted = heterodyne_chain(propagate(input, s21), het).waveform;
  const Waveform reference = heterodyne_chain(propagate(input, s21_ref), het).waveform;

  PulseOutcome outcome;
  outcome.result = fit_arrival(transmitted, reference);

  const std::string in_path = config.output_dir + "/pulse_input.csv";
  const std::string out_path = config.output_dir + "/pulse_transmitted.csv";
  const std::string ref_path = config.output_dir + "/pulse_reference.csv";
  const std::string res_path = config.output_dir + "/pulse_result.json";
  io::write_text_file(in_path, io::waveform_csv(input));
  io::write_text_file(out_path, io::waveform_csv(transmitted));
  io::write_text_file(ref_path, io::waveform_csv(reference));
  json result = io::to_json(outcome.result);
  result["control_power_dBm"] = config.drive.power_start_dBm;
  result["Omega_c_over_2pi_Hz"] = angular_to_hz(Omega);
  io::write_json_file(res_path, result);
  outcome.output_files = {in_path, out_path, ref_path, res_path};
  write_manifest(config, "pulse", outcome.output_files);
  return outcome;
}

CalibrationOutcome run_calibrate(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const auto& cal = config.calibration;

  const QubitRecord* rec = &ctx.set.qubits.front();
  if (!cal.qubit_label.empty()) {
    auto it = std::find_if(ctx.set.qubits.begin(), ctx.set.qubits.end(),
                           [&](const QubitRecord& r) { return r.label == cal.qubit_label; });
    if (it == ctx.set.qubits.end()) {
      throw ConfigError("calibration qubit '" + cal.qubit_label + "' not in parameter set");
    }
    rec = &*it;
  }
  if (!rec->has_gamma20()) {
    throw ConfigError("calibration qubit '" + rec->label + "' has no measured gamma20");
  }
  const TransmonQubit qubit = rec->to_qubit();
  const double omega_c = qubit.omega21();

  if (cal.points < 4) throw ConfigError("calibration.points too small");
  if (!(cal.alpha > 0.0)) throw ConfigError("calibration.alpha must be positive");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Splitting-vs-power generator: Omega = a sqrt(P_appl), a set by the
  // injected attenuation alpha.
  const double a_true = std::sqrt(4.0 * qubit.Gamma10 * cal.alpha / (kHbar * omega_c));
  std::vector<SplittingPoint> splittings;
  const double lo = cal.power_start_dBm, hi = cal.power_stop_dBm;
  for (std::size_t i = 0; i < cal.points; ++i) {
    const double dbm = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(cal.points - 1);
    const double p = dbm_to_watts(dbm);
    const double noise = 1.0 + cal.splitting_noise_relative * gauss(rng);
    splittings.push_back({p, a_true * std::sqrt(p) * noise});
  }
  const CalibrationResult alpha_fit = fit_calibration_factor(splittings, qubit, omega_c);

  // Resonant-transmission trace for the gamma20 estimate, on-chip powers.
  std::vector<TransmissionPoint> trace;
  for (std::size_t i = 0; i < cal.points; ++i) {
    const double dbm = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(cal.points - 1);
    const double p_chip = cal.alpha * dbm_to_watts(dbm);
    const double Omega = power_to_rabi(qubit, p_chip, omega_c);
    const double t = resonant_transmission(qubit, Omega) + cal.transmission_noise * gauss(rng);
    trace.push_back({p_chip, t});
  }
  const Gamma20Result gamma_fit = extract_gamma20(trace, qubit);

  CalibrationOutcome outcome;
  outcome.alpha_true = cal.alpha;
  outcome.alpha_fit = alpha_fit.alpha;
  outcome.gamma20_true = qubit.gamma20;
  outcome.gamma20_fit = gamma_fit.gamma20;

  json report{
      {"qubit", rec->label},
      {"alpha_true", outcome.alpha_true},
      {"alpha_fit", outcome.alpha_fit},
      {"alpha_relative_error", std::abs(outcome.alpha_fit - outcome.alpha_true) / outcome.alpha_true},
      {"a_true", a_true},
      {"a_fit", alpha_fit.a},
      {"gamma20_true_over_2pi_Hz", angular_to_hz(outcome.gamma20_true)},
      {"gamma20_fit_over_2pi_Hz", angular_to_hz(outcome.gamma20_fit)},
      {"gamma20_relative_error",
       std::abs(outcome.gamma20_fit - outcome.gamma20_true) / outcome.gamma20_true},
      {"splitting_fit_rss", alpha_fit.report.rss},
      {"gamma20_fit_rss", gamma_fit.report.rss},
      {"gamma20_fit_iterations", gamma_fit.report.iterations},
  };
  const std::string path = config.output_dir + "/calibration.json";
  io::write_json_file(path, report);
  outcome.output_files = {path};
  write_manifest(config, "calibrate", outcome.output_files);
  return outcome;
}

DiscriminateOutcome run_discriminate(const ExperimentConfig& config) {
  const ExperimentContext ctx = make_context(config);
  const QubitRecord& rec = ctx.set.qubits.front();
  if (!rec.has_gamma20()) {
    throw ConfigError("discriminate qubit '" + rec.label + "' has no measured gamma20");
  }
  const TransmonQubit qubit = rec.to_qubit().tuned_to(ctx.omega_resonance);
  const double Omega = mhz_to_angular(config.discriminate.Omega_c_over_2pi_MHz);
  const ControlDrive drive = ControlDrive::resonant(qubit, Omega);

  const FrequencyGrid grid =
      FrequencyGrid::centered(qubit.omega10, mhz_to_angular(config.discriminate.span_MHz),
                              config.discriminate.points);
  std::vector<double> mag(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mag[i] = std::abs(transmission(qubit, drive, grid[i]));
  }

  DiscriminateOutcome outcome;
  outcome.comparison = aic_discriminate(grid, mag);

  json report = io::to_json(outcome.comparison);
  report["Omega_c_over_2pi_MHz"] = config.discriminate.Omega_c_over_2pi_MHz;
  const std::string path = config.output_dir + "/discriminate.json";
  io::write_json_file(path, report);
  outcome.output_files = {path};
  write_manifest(config, "discriminate", outcome.output_files);
  return outcome;
}

}  // namespace slowlight
