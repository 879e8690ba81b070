#pragma once

#include <string>

#include <json.hpp>

#include "slowlight/band_structure.hpp"
#include "slowlight/pulse_lab.hpp"
#include "slowlight/spectroscopy.hpp"
#include "slowlight/transfer_matrix.hpp"

namespace slowlight::io {

// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double v);

// CSV columns: frequency_Hz, re_S21, im_S21, abs_S21, arg_S21_rad (phase not
// unwrapped here).
std::string spectrum_csv(const ComplexSpectrum& spectrum);
// CSV columns: omega_Hz, re_kd, im_kd, branch, in_gap.
std::string bloch_csv(const BlochSolution& solution);
// CSV columns: time_s, re, im, abs.
std::string waveform_csv(const Waveform& waveform);

nlohmann::json to_json(const DelayEstimate& estimate);
nlohmann::json to_json(const TransparencyWindow& window);
nlohmann::json to_json(const PulseResult& result);
nlohmann::json to_json(const ModelComparison& comparison);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace slowlight::io
