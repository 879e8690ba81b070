#include "slowlight/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight::io {

std::string format_double(double v) {
  char buf[32];
  // %.17g round-trips any double and is byte-stable across runs.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string spectrum_csv(const ComplexSpectrum& spectrum) {
  std::ostringstream out;
  out << "frequency_Hz,re_S21,im_S21,abs_S21,arg_S21_rad\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const complexd v = spectrum.values[i];
    out << format_double(angular_to_hz(spectrum.grid[i])) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::abs(v)) << ','
        << format_double(std::arg(v)) << '\n';
  }
  return out.str();
}

std::string bloch_csv(const BlochSolution& solution) {
  std::ostringstream out;
  out << "omega_Hz,re_kd,im_kd,branch,in_gap\n";
  const char* branch =
      solution.branch == BlochBranch::principal ? "principal" : "secondary";
  for (std::size_t i = 0; i < solution.grid.size(); ++i) {
    out << format_double(angular_to_hz(solution.grid[i])) << ','
        << format_double(solution.kd[i].real()) << ',' << format_double(solution.kd[i].imag())
        << ',' << branch << ',' << (solution.in_gap[i] ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string waveform_csv(const Waveform& waveform) {
  std::ostringstream out;
  out << "time_s,re,im,abs\n";
  for (std::size_t i = 0; i < waveform.size(); ++i) {
    const auto v = waveform.samples[i];
    out << format_double(waveform.time_at(i)) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::abs(v)) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const DelayEstimate& estimate) {
  const char* regime = "numeric";
  if (estimate.regime == DelayRegime::strong_drive) regime = "strong_drive";
  if (estimate.regime == DelayRegime::weak_drive) regime = "weak_drive";
  return {{"tau_s", estimate.tau},
          {"n_g", estimate.group_index},
          {"regime", regime},
          {"out_of_validity", estimate.out_of_validity}};
}

nlohmann::json to_json(const TransparencyWindow& window) {
  return {{"center_Hz", angular_to_hz(window.center)},
          {"bandwidth_Hz", angular_to_hz(window.bandwidth)},
          {"peak_transmission", window.peak_transmission},
          {"required_bandwidth_Hz", angular_to_hz(window.required_bandwidth)},
          {"pulse_compatible", window.pulse_compatible}};
}

nlohmann::json to_json(const PulseResult& result) {
  return {{"arrival_time_s", result.arrival_time},
          {"sigma_fit_s", result.sigma_fit},
          {"amplitude_fit", result.amplitude_fit},
          {"delay_s", result.delay},
          {"efficiency", result.efficiency},
          {"dbp", result.delay_bandwidth_product}};
}

nlohmann::json to_json(const ModelComparison& comparison) {
  return {{"ats_weight", comparison.ats_weight}, {"eit_weight", comparison.eit_weight},
          {"ats_aic", comparison.ats_aic},       {"eit_aic", comparison.eit_aic},
          {"ats_rss", comparison.ats_rss},       {"eit_rss", comparison.eit_rss},
          {"ats_params", comparison.ats_params}, {"eit_params", comparison.eit_params},
          {"valid", comparison.valid},           {"diagnostics", comparison.diagnostics}};
}

void write_text_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << contents;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace slowlight::io
