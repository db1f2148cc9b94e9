#include "tcdmrg/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tcdmrg/errors.hpp"

namespace tcdmrg {
namespace {

using boost::property_tree::ptree;

[[noreturn]] void bad_value(const std::string& key, const std::string& raw,
                            const std::string& want) {
  throw ConfigError("config: " + key + " = \"" + raw + "\" is not " + want);
}

double get_double(const ptree& tree, const std::string& key, double def,
                  bool* present = nullptr) {
  const auto raw = tree.get_optional<std::string>(key);
  if (present) *present = raw.has_value();
  if (!raw) return def;
  try {
    std::size_t used = 0;
    const double v = std::stod(*raw, &used);
    if (used != raw->size() || !std::isfinite(v)) {
      bad_value(key, *raw, "a finite number");
    }
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, *raw, "a finite number");
  }
}

std::size_t get_size(const ptree& tree, const std::string& key,
                     std::size_t def) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return def;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(*raw, &used);
    if (used != raw->size() || v < 0) {
      bad_value(key, *raw, "a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, *raw, "a non-negative integer");
  }
}

std::size_t require_size(const ptree& tree, const std::string& key) {
  if (!tree.get_optional<std::string>(key)) {
    throw ConfigError("config: required key " + key + " is missing");
  }
  return get_size(tree, key, 0);
}

double require_double(const ptree& tree, const std::string& key) {
  if (!tree.get_optional<std::string>(key)) {
    throw ConfigError("config: required key " + key + " is missing");
  }
  return get_double(tree, key, 0.0);
}

bool get_bool(const ptree& tree, const std::string& key, bool def) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return def;
  if (*raw == "true" || *raw == "1") return true;
  if (*raw == "false" || *raw == "0") return false;
  bad_value(key, *raw, "one of true, false, 1, 0");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : raw) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

template <typename T>
std::string join_list(const std::vector<T>& values,
                      std::string (*show)(T)) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += show(values[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& err) {
    throw ConfigError("config: cannot read " + path + ": " + err.message());
  }

  ExperimentConfig cfg;

  cfg.lx = require_size(tree, "lattice.lx");
  cfg.ly = require_size(tree, "lattice.ly");
  if (cfg.lx < 1) throw ConfigError("config: lattice.lx must be >= 1");
  if (cfg.ly < 1) throw ConfigError("config: lattice.ly must be >= 1");
  cfg.pbc = get_bool(tree, "lattice.pbc", true);
  if (const auto raw = tree.get_optional<std::string>("lattice.ordering")) {
    if (*raw == "snake") {
      cfg.ordering = Ordering::snake;
    } else if (*raw == "row_major") {
      cfg.ordering = Ordering::row_major;
    } else {
      bad_value("lattice.ordering", *raw, "one of snake, row_major");
    }
  }

  const std::size_t sites = cfg.lx * cfg.ly;
  cfg.model.t = require_double(tree, "model.t");
  cfg.model.u = require_double(tree, "model.u");
  cfg.model.j = get_double(tree, "model.j", 0.0);
  cfg.model.n_alpha = require_size(tree, "model.n_alpha");
  cfg.model.n_beta = require_size(tree, "model.n_beta");
  if (cfg.model.n_alpha > sites) {
    throw ConfigError("config: model.n_alpha exceeds the number of sites");
  }
  if (cfg.model.n_beta > sites) {
    throw ConfigError("config: model.n_beta exceeds the number of sites");
  }
  bool lambda_given = false;
  cfg.model.penalty_lambda =
      get_double(tree, "model.penalty_lambda", 0.0, &lambda_given);
  if (!lambda_given) {
    cfg.model.penalty_lambda = default_penalty_lambda(cfg.model);
  } else if (cfg.model.penalty_lambda < 0.0) {
    throw ConfigError("config: model.penalty_lambda must be >= 0");
  }

  const DmrgConfig defaults;
  cfg.dmrg.m = get_size(tree, "dmrg.m", defaults.m);
  if (cfg.dmrg.m < 1) throw ConfigError("config: dmrg.m must be >= 1");
  cfg.dmrg.max_sweeps = get_size(tree, "dmrg.max_sweeps", defaults.max_sweeps);
  if (cfg.dmrg.max_sweeps < 1) {
    throw ConfigError("config: dmrg.max_sweeps must be >= 1");
  }
  cfg.dmrg.energy_tol =
      get_double(tree, "dmrg.energy_tol", defaults.energy_tol);
  if (!(cfg.dmrg.energy_tol > 0.0)) {
    throw ConfigError("config: dmrg.energy_tol must be > 0");
  }
  cfg.dmrg.davidson_tol =
      get_double(tree, "dmrg.davidson_tol", defaults.davidson_tol);
  if (!(cfg.dmrg.davidson_tol > 0.0)) {
    throw ConfigError("config: dmrg.davidson_tol must be > 0");
  }
  cfg.dmrg.davidson_max_subspace = get_size(
      tree, "dmrg.davidson_max_subspace", defaults.davidson_max_subspace);
  if (cfg.dmrg.davidson_max_subspace < 2) {
    throw ConfigError("config: dmrg.davidson_max_subspace must be >= 2");
  }
  cfg.dmrg.seed = get_size(tree, "dmrg.seed", defaults.seed);

  cfg.out_path = tree.get<std::string>("output.path", cfg.out_path);
  if (cfg.out_path.empty()) {
    throw ConfigError("config: output.path must not be empty");
  }
  cfg.out_format = tree.get<std::string>("output.format", cfg.out_format);
  if (cfg.out_format != "csv") {
    bad_value("output.format", cfg.out_format, "\"csv\"");
  }

  if (const auto raw = tree.get_optional<std::string>("scan.m_list")) {
    for (const auto& part : split_list(*raw)) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(part, &used);
        if (used != part.size() || v < 1) throw std::invalid_argument(part);
        cfg.m_list.push_back(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
        bad_value("scan.m_list", part, "a positive integer");
      }
    }
  }
  if (const auto raw = tree.get_optional<std::string>("scan.j_list")) {
    for (const auto& part : split_list(*raw)) {
      try {
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size() || !std::isfinite(v)) {
          throw std::invalid_argument(part);
        }
        cfg.j_list.push_back(v);
      } catch (const std::exception&) {
        bad_value("scan.j_list", part, "a finite number");
      }
    }
  }

  return cfg;
}

std::vector<std::pair<std::string, std::string>> resolved_entries(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto put = [&out](const std::string& key, const std::string& value) {
    out.emplace_back(key, value);
  };
  put("lattice.lx", std::to_string(cfg.lx));
  put("lattice.ly", std::to_string(cfg.ly));
  put("lattice.pbc", cfg.pbc ? "true" : "false");
  put("lattice.ordering",
      cfg.ordering == Ordering::snake ? "snake" : "row_major");
  put("model.t", format_g12(cfg.model.t));
  put("model.u", format_g12(cfg.model.u));
  put("model.j", format_g12(cfg.model.j));
  put("model.n_alpha", std::to_string(cfg.model.n_alpha));
  put("model.n_beta", std::to_string(cfg.model.n_beta));
  put("model.penalty_lambda", format_g12(cfg.model.penalty_lambda));
  put("dmrg.m", std::to_string(cfg.dmrg.m));
  put("dmrg.max_sweeps", std::to_string(cfg.dmrg.max_sweeps));
  put("dmrg.energy_tol", format_g12(cfg.dmrg.energy_tol));
  put("dmrg.davidson_tol", format_g12(cfg.dmrg.davidson_tol));
  put("dmrg.davidson_max_subspace",
      std::to_string(cfg.dmrg.davidson_max_subspace));
  put("dmrg.seed", std::to_string(cfg.dmrg.seed));
  put("output.path", cfg.out_path);
  put("output.format", cfg.out_format);
  if (!cfg.m_list.empty()) {
    put("scan.m_list", join_list<std::size_t>(cfg.m_list, [](std::size_t m) {
          return std::to_string(m);
        }));
  }
  if (!cfg.j_list.empty()) {
    put("scan.j_list", join_list<double>(cfg.j_list, [](double j) {
          return format_g12(j);
        }));
  }
  return out;
}

std::string format_g12(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace tcdmrg
