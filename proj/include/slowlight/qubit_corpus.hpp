#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowlight/types.hpp"

namespace slowlight {

// One row of the measured-qubit table. Frequencies in GHz, rates as value/2pi
// in MHz, mirroring the file format; gamma20 may be absent (spurious TLS made
// it unmeasurable for some qubits).
struct QubitRecord {
  std::string label;
  double f10_GHz = 0.0;
  double Gamma10_over_2pi_MHz = 0.0;
  std::optional<double> gamma10_over_2pi_MHz;   // tabulated; wins over Gamma_nr when present
  std::optional<double> Gamma_nr_over_2pi_MHz;
  std::optional<double> gamma20_over_2pi_MHz;
  double anharmonicity_over_2pi_MHz = 0.0;
  std::optional<double> extinction_pct;
  std::optional<double> f01_max_GHz;
  std::optional<double> f01_min_GHz;

  bool has_gamma20() const { return gamma20_over_2pi_MHz.has_value(); }
  // Angular-rate qubit. The tabulated gamma10 takes precedence (Gamma_nr is
  // then derived) since it is the directly measured decoherence rate.
  // gamma20_override substitutes for a missing table value; without it a
  // missing gamma20 throws InvalidParameterError.
  TransmonQubit to_qubit(std::optional<double> gamma20_override = {}) const;
};

struct ParameterSet {
  std::string name;
  std::string note;
  std::vector<QubitRecord> qubits;
};

using Corpus = std::map<std::string, ParameterSet>;

// Loads the named parameter sets from the JSON corpus file.
Corpus load_corpus(const std::string& path);
const ParameterSet& corpus_set(const Corpus& corpus, const std::string& name);

// Built-in copies of the shipped parameter sets, so the library works without
// the data file. "measured": eight individually characterized qubits; "averages": the ensemble
// averages used for the stock experiments.
Corpus builtin_corpus();

}  // namespace slowlight
