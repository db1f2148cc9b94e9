#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcdmrg/dmrg.hpp"
#include "tcdmrg/hamiltonians.hpp"
#include "tcdmrg/lattice.hpp"

namespace tcdmrg {

// One experiment, as read from an INI file with sections [lattice], [model],
// [dmrg], [output], and (for the scan command) [scan].  Required keys:
// lattice.lx, lattice.ly, model.t, model.u, model.n_alpha, model.n_beta.
// Everything else falls back to the defaults visible below; a missing
// model.penalty_lambda resolves to default_penalty_lambda(model).
struct ExperimentConfig {
  std::size_t lx = 0;
  std::size_t ly = 0;
  bool pbc = true;
  Ordering ordering = Ordering::snake;

  ModelParams model;
  DmrgConfig dmrg;

  std::string out_path = "results.csv";
  std::string out_format = "csv";

  std::vector<std::size_t> m_list;
  std::vector<double> j_list;
};

// Parses and validates the file.  Every violated precondition raises
// ConfigError with the offending "section.key" in the message, before any
// lattice or operator is built.
ExperimentConfig load_config(const std::string& path);

// The fully resolved configuration as ordered (key, value) pairs, defaults
// included — the echo block embedded in every output file.
std::vector<std::pair<std::string, std::string>> resolved_entries(
    const ExperimentConfig& cfg);

// Shortest decimal form with 12 significant digits (printf %.12g): the
// serialization used for every floating-point value in output files.
std::string format_g12(double value);

}  // namespace tcdmrg
