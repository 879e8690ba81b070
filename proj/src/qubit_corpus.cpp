#include "slowlight/qubit_corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

namespace {

using nlohmann::json;

std::optional<double> opt_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

QubitRecord record_from_json(const json& j) {
  QubitRecord rec;
  rec.label = j.value("label", "");
  rec.f10_GHz = j.at("f10_GHz").get<double>();
  rec.Gamma10_over_2pi_MHz = j.at("Gamma10_over_2pi_MHz").get<double>();
  rec.gamma10_over_2pi_MHz = opt_field(j, "gamma10_over_2pi_MHz");
  rec.Gamma_nr_over_2pi_MHz = opt_field(j, "Gamma_nr_over_2pi_MHz");
  rec.gamma20_over_2pi_MHz = opt_field(j, "gamma20_over_2pi_MHz");
  rec.anharmonicity_over_2pi_MHz = j.at("anharmonicity_over_2pi_MHz").get<double>();
  rec.extinction_pct = opt_field(j, "extinction_pct");
  rec.f01_max_GHz = opt_field(j, "f01_max_GHz");
  rec.f01_min_GHz = opt_field(j, "f01_min_GHz");
  return rec;
}

QubitRecord make_record(const char* label, double f10, double Gamma10, double gamma10,
                        std::optional<double> Gamma_nr, std::optional<double> gamma20,
                        double anharmonicity, std::optional<double> extinction,
                        std::optional<double> f01_max, std::optional<double> f01_min) {
  QubitRecord rec;
  rec.label = label;
  rec.f10_GHz = f10;
  rec.Gamma10_over_2pi_MHz = Gamma10;
  rec.gamma10_over_2pi_MHz = gamma10;
  rec.Gamma_nr_over_2pi_MHz = Gamma_nr;
  rec.gamma20_over_2pi_MHz = gamma20;
  rec.anharmonicity_over_2pi_MHz = anharmonicity;
  rec.extinction_pct = extinction;
  rec.f01_max_GHz = f01_max;
  rec.f01_min_GHz = f01_min;
  return rec;
}

}  // namespace

TransmonQubit record_to_qubit_impl(const QubitRecord& rec, std::optional<double> gamma20_override) {
  TransmonQubit q;
  q.omega10 = ghz_to_angular(rec.f10_GHz);
  q.anharmonicity = mhz_to_angular(rec.anharmonicity_over_2pi_MHz);
  q.Gamma10 = mhz_to_angular(rec.Gamma10_over_2pi_MHz);
  if (rec.gamma10_over_2pi_MHz) {
    // Tabulated decoherence rate wins; Gamma_nr is whatever closes the
    // identity gamma10 = Gamma10/2 + Gamma_nr.
    q.Gamma_nr = mhz_to_angular(*rec.gamma10_over_2pi_MHz) - 0.5 * q.Gamma10;
    if (q.Gamma_nr < 0.0) q.Gamma_nr = 0.0;
  } else if (rec.Gamma_nr_over_2pi_MHz) {
    q.Gamma_nr = mhz_to_angular(*rec.Gamma_nr_over_2pi_MHz);
  }
  if (gamma20_override) {
    q.gamma20 = *gamma20_override;
  } else if (rec.gamma20_over_2pi_MHz) {
    q.gamma20 = mhz_to_angular(*rec.gamma20_over_2pi_MHz);
  } else {
    throw InvalidParameterError("QubitRecord '" + rec.label +
                                "': gamma20 missing (unmeasured) and no override supplied");
  }
  q.validate();
  return q;
}

TransmonQubit QubitRecord::to_qubit(std::optional<double> gamma20_override) const {
  return record_to_qubit_impl(*this, gamma20_override);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open qubit corpus: " + path);
  json root = json::parse(in);

  Corpus corpus;
  for (const auto& [name, body] : root.at("parameter_sets").items()) {
    ParameterSet set;
    set.name = name;
    set.note = body.value("note", "");
    for (const auto& q : body.at("qubits")) set.qubits.push_back(record_from_json(q));
    if (set.qubits.empty()) throw ConfigError("parameter set '" + name + "' has no qubits");
    corpus.emplace(name, std::move(set));
  }
  if (corpus.empty()) throw ConfigError("qubit corpus is empty: " + path);
  return corpus;
}

const ParameterSet& corpus_set(const Corpus& corpus, const std::string& name) {
  auto it = corpus.find(name);
  if (it == corpus.end()) {
    throw ConfigError("unknown qubit parameter set '" + name + "'");
  }
  return it->second;
}

Corpus builtin_corpus() {
  Corpus corpus;

  ParameterSet table;
  table.name = "measured";
  table.note = "per-qubit properties measured around 7.81 GHz (post thermal cycle)";
  table.qubits = {
      make_record("Q1", 7.812, 7.3, 4.2, 0.52, 8.7, 283.0, 98.4, 8.097, 3.029),
      make_record("Q2", 7.812, 9.5, 5.3, 0.56, 8.3, 279.0, 98.9, 7.900, 3.091),
      make_record("Q3", 7.812, 11.3, 6.7, 1.0, std::nullopt, 273.0, 97.7, 8.088, 2.912),
      make_record("Q4", 7.812, 13.9, 8.4, 1.36, 6.7, 275.0, 97.4, 8.114, 2.986),
      make_record("Q5", 7.812, 14.5, 8.1, 0.83, 5.6, 267.0, 99.0, 8.115, 2.970),
      make_record("Q6", 7.812, 14.6, 8.1, 0.83, 6.2, 281.0, 99.0, 7.950, 2.936),
      make_record("Q7", 7.812, 12.1, 6.7, 0.65, std::nullopt, 273.0, 99.1, 8.066, 2.588),
      make_record("Q8", 7.812, 11.9, 7.2, 1.3, 5.7, 276.0, 96.8, 8.136, 2.484),
  };
  corpus.emplace(table.name, std::move(table));

  ParameterSet averages;
  averages.name = "averages";
  averages.note = "ensemble averages used for the stock chain experiments";
  averages.qubits = {
      make_record("avg", 7.812, 12.0, 6.9, 0.9, 6.9, 279.0, std::nullopt, std::nullopt,
                  std::nullopt),
  };
  corpus.emplace(averages.name, std::move(averages));

  return corpus;
}

}  // namespace slowlight
