// SPDX-License-Identifier: Apache-2.0
#include "blr/run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace blr {

namespace {

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double as_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config: " + std::string(key) + " expects a number, got '" + std::string(v) + "'");
}

std::size_t as_count(std::string_view key, std::string_view v) {
  const std::string s(v);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("config: " + std::string(key) + " expects a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(std::stoull(s));
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"N_init", "N_expl", "M_fin", "T_max",   "rho_min", "P_and", "P_not",
                                                "P_init", "P_c",    "rho_del", "C_max", "k_max",   "d"};
  return keys;
}

void set_config_value(GmjmcmcConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v = strip(value);
  if (key == "N_init")
    cfg.n_init = as_count(key, v);
  else if (key == "N_expl")
    cfg.n_expl = as_count(key, v);
  else if (key == "M_fin")
    cfg.m_fin = as_count(key, v);
  else if (key == "T_max")
    cfg.t_max = as_count(key, v);
  else if (key == "rho_min")
    cfg.rho_min = as_double(key, v);
  else if (key == "P_and")
    cfg.p_and = as_double(key, v);
  else if (key == "P_not")
    cfg.p_not = as_double(key, v);
  else if (key == "P_init")
    cfg.p_init = as_double(key, v);
  else if (key == "P_c")
    cfg.p_c = as_double(key, v);
  else if (key == "rho_del")
    cfg.rho_del = as_double(key, v);
  else if (key == "C_max")
    cfg.c_max = static_cast<std::uint32_t>(as_count(key, v));
  else if (key == "k_max")
    cfg.k_max = static_cast<std::uint32_t>(as_count(key, v));
  else if (key == "d")
    cfg.d = as_count(key, v);
  else
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

void apply_config(GmjmcmcConfig& cfg, std::istream& in, const std::string& origin) {
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const std::string s = strip(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(no) + ": expected key = value");
    try {
      set_config_value(cfg, strip(s.substr(0, eq)), s.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void apply_config_file(GmjmcmcConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  apply_config(cfg, in, path);
}

}  // namespace blr
