// qwalk: run one experiment described by a JSON config file.
//
//   qwalk <config.json> [--out DIR] [--threads N] [--seed S]
//
// Exit codes: 0 success, 1 validation error, 2 numerical error, 3 I/O error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "qwalk/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"two-dimensional quantum walk toolkit"};
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  long long seed = -1;
  app.add_option("config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (default: current directory)");
  app.add_option("--threads", threads, "worker thread cap (default: machine parallelism)");
  app.add_option("--seed", seed, "RNG seed for sampling experiments (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw qwalk::IoError("cannot open config file: " + config_path);
    std::ostringstream text;
    text << in.rdbuf();

    qwalk::ExperimentConfig cfg = qwalk::parse_config_text(text.str());
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (threads > 0) qwalk::set_max_threads(threads);

    const auto files = qwalk::run_experiment(cfg, out_dir);
    for (const auto& f : files) std::cout << f << "\n";
    return 0;
  } catch (const qwalk::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const qwalk::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const qwalk::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
