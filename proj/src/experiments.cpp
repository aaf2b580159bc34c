#include "experiments.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "qwalk/io.hpp"
#include "qwalk/json_io.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

namespace {

const double kPiD = kPi<double>;

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ValidationError(std::string("config: field '") + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v))
    throw ValidationError(std::string("config: field '") + key + "' is not finite");
  return v;
}

long long integer_or(const nlohmann::json& j, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ValidationError(std::string("config: field '") + key + "' must be an integer");
  return j.at(key).get<long long>();
}

long long require_integer(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw ValidationError(std::string("config: missing field '") + key + "'");
  return integer_or(j, key, 0);
}

CoinParams<double> require_coin(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw ValidationError(std::string("config: missing field '") + key + "'");
  return coin_params_from_json(j.at(key), key);
}

Torus torus_from(const nlohmann::json& j, Index def_l = -1, Index def_m = -1) {
  const long long l = integer_or(j, "L", def_l);
  const long long m = integer_or(j, "M", def_m);
  if (l < 0) throw ValidationError("config: missing field 'L'");
  if (m < 0) throw ValidationError("config: missing field 'M'");
  if (l < 2 || m < 2) throw ValidationError("config: torus extents 'L', 'M' must be >= 2");
  return Torus(static_cast<Index>(l), static_cast<Index>(m));
}

SpectrumConfig parse_spectrum(const nlohmann::json& j) {
  reject_unknown_keys(j, {"experiment", "coin", "nk", "nl", "flat_tol"}, "spectrum config");
  SpectrumConfig c{require_coin(j, "coin"),
                   MomentumGrid(static_cast<int>(integer_or(j, "nk", 64)),
                                static_cast<int>(integer_or(j, "nl", 64))),
                   number_or(j, "flat_tol", 1e-10)};
  if (!(c.flat_tol > 0)) throw ValidationError("config: 'flat_tol' must be positive");
  return c;
}

TrapMapConfig<double> parse_trapmap(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "n1", "n2", "delta1_min", "delta1_max", "delta2_min",
                       "delta2_max", "alpha1", "beta1", "alpha2", "beta2", "phi", "steps", "L",
                       "M"},
                      "trapmap config");
  TrapMapConfig<double> c;
  c.n1 = static_cast<int>(integer_or(j, "n1", 46));
  c.n2 = static_cast<int>(integer_or(j, "n2", 46));
  if (c.n1 < 2 || c.n2 < 2) throw ValidationError("config: 'n1'/'n2' must be >= 2");
  c.d1_min = number_or(j, "delta1_min", 0.0);
  c.d1_max = number_or(j, "delta1_max", kPiD);
  c.d2_min = number_or(j, "delta2_min", 0.0);
  c.d2_max = number_or(j, "delta2_max", kPiD);
  c.alpha1 = number_or(j, "alpha1", kPiD / 2);
  c.beta1 = number_or(j, "beta1", kPiD / 2);
  c.alpha2 = number_or(j, "alpha2", kPiD / 2);
  c.beta2 = number_or(j, "beta2", kPiD / 2);
  c.phi = number_or(j, "phi", kPiD);
  c.steps = static_cast<int>(integer_or(j, "steps", 40));
  if (c.steps < 0) throw ValidationError("config: 'steps' must be >= 0");
  const Torus t = torus_from(j, 81, 81);
  c.torus_width = t.width;
  c.torus_height = t.height;
  if (std::min(t.width, t.height) < 2 * static_cast<Index>(c.steps) + 1)
    throw ValidationError("config: torus 'L'/'M' too small for 'steps' (needs >= 2*steps+1)");
  return c;
}

TopoMapConfig<double> parse_topomap(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "n1", "n2", "delta1_min", "delta1_max", "delta2_min",
                       "delta2_max", "alpha1", "beta1", "alpha2", "beta2", "phi", "reference",
                       "width_a", "width_b", "k_points", "bulk_grid", "interface_window",
                       "gap_tol", "localization_threshold"},
                      "topomap config");
  TopoMapConfig<double> c;
  c.n1 = static_cast<int>(integer_or(j, "n1", 46));
  c.n2 = static_cast<int>(integer_or(j, "n2", 46));
  if (c.n1 < 2 || c.n2 < 2) throw ValidationError("config: 'n1'/'n2' must be >= 2");
  c.d1_min = number_or(j, "delta1_min", 0.0);
  c.d1_max = number_or(j, "delta1_max", kPiD);
  c.d2_min = number_or(j, "delta2_min", 0.0);
  c.d2_max = number_or(j, "delta2_max", kPiD);
  c.alpha1 = number_or(j, "alpha1", kPiD / 2);
  c.beta1 = number_or(j, "beta1", kPiD / 2);
  c.alpha2 = number_or(j, "alpha2", kPiD / 2);
  c.beta2 = number_or(j, "beta2", kPiD / 2);
  c.phi = number_or(j, "phi", kPiD);
  if (j.contains("reference")) c.reference = coin_params_from_json(j.at("reference"), "reference");
  c.width_a = static_cast<int>(integer_or(j, "width_a", 20));
  c.width_b = static_cast<int>(integer_or(j, "width_b", 20));
  if (c.width_a < 4 || c.width_b < 4)
    throw ValidationError("config: strip widths 'width_a'/'width_b' must be >= 4");
  c.k_points = static_cast<int>(integer_or(j, "k_points", 201));
  if (c.k_points < 2) throw ValidationError("config: 'k_points' must be >= 2");
  c.bulk_grid = static_cast<int>(integer_or(j, "bulk_grid", 32));
  if (c.bulk_grid < 2) throw ValidationError("config: 'bulk_grid' must be >= 2");
  c.interface_window = static_cast<int>(integer_or(j, "interface_window", 4));
  c.detect.gap_tol = number_or(j, "gap_tol", 0.05);
  c.detect.localization_threshold = number_or(j, "localization_threshold", 0.9);
  return c;
}

EvolveConfig parse_evolve(const nlohmann::json& j) {
  reject_unknown_keys(j, {"experiment", "L", "M", "coin", "steps", "initial"}, "evolve config");
  EvolveConfig c{torus_from(j), require_coin(j, "coin"),
                 static_cast<int>(require_integer(j, "steps")), {}};
  if (c.steps < 0) throw ValidationError("config: 'steps' must be >= 0");
  if (!j.contains("initial")) throw ValidationError("config: missing field 'initial'");
  const auto& ini = j.at("initial");
  reject_unknown_keys(ini, {"type", "x", "y", "coin_vec"}, "initial");
  if (!ini.contains("type") || !ini.at("type").is_string())
    throw ValidationError("config: 'initial.type' must be a string");
  const std::string type = ini.at("type").get<std::string>();
  if (type == "uniform") {
    c.initial.uniform = true;
  } else if (type == "localized") {
    c.initial.uniform = false;
    c.initial.x = static_cast<Index>(integer_or(ini, "x", 0));
    c.initial.y = static_cast<Index>(integer_or(ini, "y", 0));
    if (c.initial.x < 0 || c.initial.x >= c.torus.width || c.initial.y < 0 ||
        c.initial.y >= c.torus.height)
      throw ValidationError("config: 'initial.x'/'initial.y' outside torus");
    if (!ini.contains("coin_vec") || !ini.at("coin_vec").is_array() ||
        ini.at("coin_vec").size() != 8)
      throw ValidationError(
          "config: 'initial.coin_vec' must be an array of 8 numbers (re, im per component)");
    for (int i = 0; i < 4; ++i) {
      const auto re = ini.at("coin_vec").at(2 * i);
      const auto im = ini.at("coin_vec").at(2 * i + 1);
      if (!re.is_number() || !im.is_number())
        throw ValidationError("config: 'initial.coin_vec' entries must be numbers");
      c.initial.coin_vec(i) = Complex<double>(re.get<double>(), im.get<double>());
    }
  } else {
    throw ValidationError("config: 'initial.type' must be 'uniform' or 'localized'");
  }
  return c;
}

SearchExperimentConfig parse_search(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "L", "M", "coin", "coin_b", "marked_x", "marked_y",
                       "measuring_time", "record_steps"},
                      "search config");
  const Torus t = torus_from(j);
  const Index mx = static_cast<Index>(integer_or(j, "marked_x", 0));
  const Index my = static_cast<Index>(integer_or(j, "marked_y", 0));
  const int tm = static_cast<int>(integer_or(j, "measuring_time", -1));
  const int rec = static_cast<int>(integer_or(j, "record_steps", -1));
  SearchExperimentConfig c{make_search_config(t, require_coin(j, "coin"), mx, my, tm, rec), {}};
  if (j.contains("coin_b"))
    c.run_b = make_search_config(t, coin_params_from_json(j.at("coin_b"), "coin_b"), mx, my, tm,
                                 rec);
  return c;
}

SpectralMatchConfig parse_spectral_match(const nlohmann::json& j) {
  reject_unknown_keys(j, {"experiment", "c1", "c2", "samples", "nk", "nl"},
                      "spectral-match config");
  SpectralMatchConfig c{MomentumGrid(static_cast<int>(integer_or(j, "nk", 32)),
                                     static_cast<int>(integer_or(j, "nl", 32))),
                        {}, 0};
  const bool has_coins = j.contains("c1") || j.contains("c2");
  const bool has_samples = j.contains("samples");
  if (has_coins == has_samples)
    throw ValidationError("config: give either 'c1'+'c2' or 'samples', not both");
  if (has_coins) {
    if (!j.contains("c1") || !j.contains("c2"))
      throw ValidationError("config: both 'c1' and 'c2' are required");
    c.coins = {su2_params_from_json(j.at("c1"), "c1"), su2_params_from_json(j.at("c2"), "c2")};
  } else {
    c.samples = static_cast<int>(require_integer(j, "samples"));
    if (c.samples < 1) throw ValidationError("config: 'samples' must be >= 1");
  }
  return c;
}

nlohmann::json meta_skeleton(const ExperimentConfig& cfg) {
  return nlohmann::json{{"experiment", cfg.echo.at("experiment")},
                        {"config", cfg.echo},
                        {"defaults_version", 1},
                        {"seed", cfg.seed},
                        {"threads", max_threads()}};
}

std::string join(const std::filesystem::path& dir, const std::string& name) {
  return (dir / name).string();
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("config: document must be a JSON object");
  if (!doc.contains("experiment") || !doc.at("experiment").is_string())
    throw ValidationError("config: missing string field 'experiment'");
  const std::string kind = doc.at("experiment").get<std::string>();

  ExperimentConfig cfg;
  cfg.echo = doc;
  cfg.seed = static_cast<uint64_t>(integer_or(doc, "seed", 0));
  // 'seed' rides along in any experiment; strip before per-kind key checks.
  nlohmann::json body = doc;
  body.erase("seed");

  if (kind == "spectrum") {
    cfg.kind = ExperimentKind::kSpectrum;
    cfg.spectrum = parse_spectrum(body);
  } else if (kind == "trapmap") {
    cfg.kind = ExperimentKind::kTrapMap;
    cfg.trapmap = parse_trapmap(body);
  } else if (kind == "topomap") {
    cfg.kind = ExperimentKind::kTopoMap;
    cfg.topomap = parse_topomap(body);
  } else if (kind == "evolve") {
    cfg.kind = ExperimentKind::kEvolve;
    cfg.evolve = parse_evolve(body);
  } else if (kind == "search") {
    cfg.kind = ExperimentKind::kSearch;
    cfg.search = parse_search(body);
  } else if (kind == "spectral-match") {
    cfg.kind = ExperimentKind::kSpectralMatch;
    cfg.match = parse_spectral_match(body);
  } else {
    throw ValidationError("config: unknown experiment kind '" + kind + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(doc);
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> files;
  nlohmann::json meta = meta_skeleton(cfg);

  switch (cfg.kind) {
    case ExperimentKind::kSpectrum: {
      const SpectrumConfig& sc = *cfg.spectrum;
      const BandStructure<double> bands = band_structure(cclass_coin(sc.coin), sc.grid);
      const GapWidths<double> gaps = gap_widths(bands);
      write_band_csv(join(dir, "bands.csv"), bands);
      write_gap_json(join(dir, "gaps.json"), gaps, sc.flat_tol, sc.grid);
      meta["flat_deviation"] = {{"at0", bands.max_flat_dev_zero}, {"atPi", bands.max_flat_dev_pi}};
      files = {join(dir, "bands.csv"), join(dir, "gaps.json")};
      break;
    }
    case ExperimentKind::kTrapMap: {
      const TrapMapResult<double> r = trap_map(*cfg.trapmap);
      write_trapmap_csv(join(dir, "trapmap.csv"), r);
      meta["trapmap"] = {{"steps", r.config.steps},
                         {"torus", {{"L", r.config.torus_width}, {"M", r.config.torus_height}}},
                         {"fixed",
                          {{"alpha1", r.config.alpha1},
                           {"beta1", r.config.beta1},
                           {"alpha2", r.config.alpha2},
                           {"beta2", r.config.beta2},
                           {"phi", r.config.phi}}},
                         {"grid", {{"n1", r.config.n1}, {"n2", r.config.n2}}}};
      files = {join(dir, "trapmap.csv")};
      break;
    }
    case ExperimentKind::kTopoMap: {
      const TopoMapResult<double> r = topo_map(*cfg.topomap);
      write_topomap_csv(join(dir, "topomap.csv"), r);
      meta["topomap"] = {{"reference", coin_params_to_json(r.config.reference)},
                         {"strip", {{"width_a", r.config.width_a}, {"width_b", r.config.width_b}}},
                         {"k_points", r.config.k_points},
                         {"bulk_grid", r.config.bulk_grid}};
      files = {join(dir, "topomap.csv")};
      break;
    }
    case ExperimentKind::kEvolve: {
      const EvolveConfig& evc = *cfg.evolve;
      WalkState<double> psi =
          evc.initial.uniform
              ? uniform_state<double>(evc.torus)
              : localized_state(evc.torus, evc.initial.x, evc.initial.y, evc.initial.coin_vec);
      const CoinField<double> cf(cclass_coin(evc.coin));
      psi = evolve(psi, cf, evc.steps);
      write_state_csv(join(dir, "state.csv"), psi, evc.steps);
      meta["final_norm"] = psi.norm();
      files = {join(dir, "state.csv")};
      break;
    }
    case ExperimentKind::kSearch: {
      const SearchExperimentConfig& se = *cfg.search;
      if (se.run_b) {
        const SearchComparison<double> cmp = compare_search(se.run_a, *se.run_b);
        write_search_csv(join(dir, "search.csv"), cmp.run_a);
        write_search_csv(join(dir, "search_b.csv"), cmp.run_b);
        write_json_file(join(dir, "compare.json"),
                        nlohmann::json{{"config_a", coin_params_to_json(se.run_a.bulk)},
                                       {"config_b", coin_params_to_json(se.run_b->bulk)},
                                       {"measuring_time", se.run_a.measuring_time},
                                       {"pA_at_T", cmp.p_a_at_t},
                                       {"pB_at_T", cmp.p_b_at_t},
                                       {"ratio", cmp.ratio}});
        files = {join(dir, "search.csv"), join(dir, "search_b.csv"), join(dir, "compare.json")};
      } else {
        const SearchRun<double> run = run_search(se.run_a);
        write_search_csv(join(dir, "search.csv"), run);
        meta["p_at_measuring_time"] = run.p_marked.at(run.config.measuring_time);
        files = {join(dir, "search.csv")};
      }
      break;
    }
    case ExperimentKind::kSpectralMatch: {
      const SpectralMatchConfig& mc = *cfg.match;
      nlohmann::json out;
      out["grid"] = {{"nk", mc.grid.nk}, {"nl", mc.grid.nl}};
      if (mc.coins) {
        const CoinParams<double> p{mc.coins->first, mc.coins->second, 0.0};
        out["c1"] = su2_params_to_json(mc.coins->first);
        out["c2"] = su2_params_to_json(mc.coins->second);
        out["max_deviation"] = spectral_match(p, mc.grid);
      } else {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> angle(-kPiD, kPiD);
        double worst = 0;
        nlohmann::json per = nlohmann::json::array();
        for (int s = 0; s < mc.samples; ++s) {
          const CoinParams<double> p{{angle(rng), angle(rng), angle(rng)},
                                     {angle(rng), angle(rng), angle(rng)},
                                     0.0};
          const double dev = spectral_match(p, mc.grid);
          worst = std::max(worst, dev);
          per.push_back(dev);
        }
        out["samples"] = mc.samples;
        out["seed"] = cfg.seed;
        out["per_sample"] = per;
        out["max_deviation"] = worst;
      }
      write_json_file(join(dir, "match.json"), out);
      files = {join(dir, "match.json")};
      break;
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  meta["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
  write_json_file(join(dir, "meta.json"), meta);
  files.push_back(join(dir, "meta.json"));
  return files;
}

}  // namespace qwalk
