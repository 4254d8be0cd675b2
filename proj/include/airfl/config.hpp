#ifndef AIRFL_CONFIG_HPP_
#define AIRFL_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace airfl {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// All scenario parameters for one experiment. Defaults follow the reference
// scenario: 6 devices, 3 RISs with 60 elements each, single-antenna BS.
struct SystemConfig {
  int num_devices = 6;        // N
  int num_ris = 3;            // L
  int elements_per_ris = 60;  // M
  int bs_antennas = 1;        // N_r (1 = scalar receive)

  double max_power_dbm = 23.0;    // P0
  double noise_power_dbm = -80.0; // sigma^2
  double gamma = 0.2;             // MSE / cardinality trade-off weight
  double epsilon0 = 0.01;         // aggregation MSE tolerance

  double area_side_m = 100.0;
  double ris_height_m = 20.0;
  double bs_height_m = 25.0;

  double pathloss_ref_db = -30.0; // reference loss at 1 m
  double alpha_direct = 3.5;      // device-BS exponent (blocked path)
  double alpha_ris = 2.2;         // both RIS legs

  std::uint64_t seed = 0;

  double max_power_w() const { return dbm_to_watt(max_power_dbm); }
  double noise_power_w() const { return dbm_to_watt(noise_power_dbm); }

  // Collects every invariant violation; empty means valid.
  std::vector<std::string> validate() const {
    std::vector<std::string> errs;
    if (num_devices < 1) errs.push_back("num_devices: must be >= 1");
    if (num_ris < 0) errs.push_back("num_ris: must be >= 0");
    if (elements_per_ris < 1) errs.push_back("elements_per_ris: must be >= 1");
    if (bs_antennas < 1) errs.push_back("bs_antennas: must be >= 1");
    if (gamma <= 0.0) errs.push_back("gamma: must be > 0");
    if (epsilon0 <= 0.0) errs.push_back("epsilon0: must be > 0");
    if (area_side_m <= 0.0) errs.push_back("area_side_m: must be > 0");
    if (ris_height_m <= 0.0) errs.push_back("ris_height_m: must be > 0");
    if (bs_height_m <= 0.0) errs.push_back("bs_height_m: must be > 0");
    if (!(max_power_w() > 0.0)) errs.push_back("max_power_dbm: must convert to positive watts");
    if (!(noise_power_w() > 0.0)) errs.push_back("noise_power_dbm: must convert to positive watts");
    return errs;
  }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parses a flat key = value text config. Unknown keys are rejected so typos
// surface immediately; '#' starts a comment.
inline SystemConfig parse_config_text(std::istream& in) {
  SystemConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  std::vector<std::string> errs;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, eq, value;
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=" || !(ls >> value)) {
      errs.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    kv[key] = value;
  }

  auto take_int = [&](const std::string& k, int& dst) {
    auto it = kv.find(k);
    if (it == kv.end()) return;
    try {
      dst = std::stoi(it->second);
    } catch (const std::exception&) {
      errs.push_back(k + ": not an integer: " + it->second);
    }
    kv.erase(it);
  };
  auto take_real = [&](const std::string& k, double& dst) {
    auto it = kv.find(k);
    if (it == kv.end()) return;
    try {
      dst = std::stod(it->second);
    } catch (const std::exception&) {
      errs.push_back(k + ": not a number: " + it->second);
    }
    kv.erase(it);
  };

  take_int("num_devices", cfg.num_devices);
  take_int("num_ris", cfg.num_ris);
  take_int("elements_per_ris", cfg.elements_per_ris);
  take_int("bs_antennas", cfg.bs_antennas);
  take_real("max_power_dbm", cfg.max_power_dbm);
  take_real("noise_power_dbm", cfg.noise_power_dbm);
  take_real("gamma", cfg.gamma);
  take_real("epsilon0", cfg.epsilon0);
  take_real("area_side_m", cfg.area_side_m);
  take_real("ris_height_m", cfg.ris_height_m);
  take_real("bs_height_m", cfg.bs_height_m);
  take_real("pathloss_ref_db", cfg.pathloss_ref_db);
  take_real("alpha_direct", cfg.alpha_direct);
  take_real("alpha_ris", cfg.alpha_ris);
  if (auto it = kv.find("seed"); it != kv.end()) {
    try {
      cfg.seed = std::stoull(it->second);
    } catch (const std::exception&) {
      errs.push_back("seed: not an unsigned integer: " + it->second);
    }
    kv.erase(it);
  }
  for (const auto& [k, v] : kv) errs.push_back("unknown key: " + k);

  for (const auto& e : cfg.validate()) errs.push_back(e);
  if (!errs.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config_text(in);
}

}  // namespace airfl

#endif  // AIRFL_CONFIG_HPP_
