#pragma once

// Experiment configuration schema and runners behind the qwalk CLI.
//
// A config is a single JSON object selected by its "experiment" field:
//   spectrum | trapmap | topomap | evolve | search | spectral-match
// All angles are radians; unknown fields are rejected. Every experiment
// writes deterministic data files plus a meta.json sidecar (the one file
// allowed to contain wall time).

#include <optional>
#include <string>

#include <json.hpp>

#include "qwalk/coin.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/search.hpp"
#include "qwalk/topology.hpp"
#include "qwalk/trapping.hpp"

namespace qwalk {

enum class ExperimentKind { kSpectrum, kTrapMap, kTopoMap, kEvolve, kSearch, kSpectralMatch };

struct SpectrumConfig {
  CoinParams<double> coin;
  MomentumGrid grid{64, 64};
  double flat_tol = 1e-10;
};

struct EvolveInitial {
  bool uniform = false;    // otherwise localized
  Index x = 0, y = 0;
  Vec4c<double> coin_vec;  // used when localized
};

struct EvolveConfig {
  Torus torus{2, 2};
  CoinParams<double> coin;
  int steps = 0;
  EvolveInitial initial;
};

struct SearchExperimentConfig {
  SearchConfig<double> run_a;
  std::optional<SearchConfig<double>> run_b;
};

struct SpectralMatchConfig {
  MomentumGrid grid{32, 32};
  // either explicit SU(2) pairs or a sampled batch driven by the seed
  std::optional<std::pair<Su2Params<double>, Su2Params<double>>> coins;
  int samples = 0;
};

struct ExperimentConfig {
  ExperimentKind kind;
  nlohmann::json echo;  // parsed config, defaults filled in
  uint64_t seed = 0;

  std::optional<SpectrumConfig> spectrum;
  std::optional<TrapMapConfig<double>> trapmap;
  std::optional<TopoMapConfig<double>> topomap;
  std::optional<EvolveConfig> evolve;
  std::optional<SearchExperimentConfig> search;
  std::optional<SpectralMatchConfig> match;
};

// Parses and validates a config document. Throws ValidationError with the
// offending field named.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);

// Runs the experiment and writes its output files into out_dir (created if
// missing). Returns the list of files written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace qwalk
