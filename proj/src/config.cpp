#include "ksfft/config.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "ksfft/error.hpp"

namespace ksfft {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad number for " + key + ": " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad integer for " + key + ": " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::InvalidArgument, "bad boolean for " + key + ": " + v);
}

ViewMode to_mode(const std::string& key, const std::string& v) {
  if (v == "dense") return ViewMode::Dense;
  if (v == "recursive") return ViewMode::Recursive;
  throw Error(ErrorCode::InvalidArgument, "bad view mode for " + key + ": " + v);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "alpha") alpha = to_double(key, v);
  else if (key == "lambda_threshold") lambda_threshold = to_double(key, v);
  else if (key == "peel_load_max") peel_load_max = to_double(key, v);
  else if (key == "t") t = static_cast<int>(to_int(key, v));
  else if (key == "rho_sparse") rho_sparse = to_double(key, v);
  else if (key == "rho_dense") rho_dense = to_double(key, v);
  else if (key == "moduli") {
    moduli.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const long long m = to_int(key, trim(item));
      if (m < 2) throw Error(ErrorCode::InvalidArgument, "moduli must be >= 2");
      moduli.push_back(static_cast<std::uint64_t>(m));
    }
  } else if (key == "identity_hash") identity_hash = to_bool(key, v);
  else if (key == "composite_moduli") composite_moduli = to_bool(key, v);
  else if (key == "shift_count") shift_count = static_cast<int>(to_int(key, v));
  else if (key == "singleton_tol") singleton_tol = to_double(key, v);
  else if (key == "noise_floor_rel") noise_floor_rel = to_double(key, v);
  else if (key == "verify_eps_rel") verify_eps_rel = to_double(key, v);
  else if (key == "tau_rel") tau_rel = to_double(key, v);
  else if (key == "round_factor") round_factor = to_double(key, v);
  else if (key == "max_rehash") max_rehash = static_cast<int>(to_int(key, v));
  else if (key == "max_extra_verify_views") max_extra_verify_views = static_cast<int>(to_int(key, v));
  else if (key == "view_mode") view_mode = to_mode(key, v);
  else if (key == "verify_mode") verify_mode = to_mode(key, v);
  else if (key == "max_depth") max_depth = static_cast<int>(to_int(key, v));
  else if (key == "dense_cap") dense_cap = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "threads") threads = static_cast<int>(to_int(key, v));
  else if (key == "force_fallback") force_fallback = to_bool(key, v);
  else if (key == "gate_certificate") gate_certificate = to_bool(key, v);
  else throw Error(ErrorCode::InvalidArgument, "unknown config key: " + key);

  if (shift_count < 2 || shift_count > 3) {
    throw Error(ErrorCode::InvalidArgument, "shift_count must be 2 or 3");
  }
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
}

Config parse_config(const std::string& text, Config base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

int resolve_threads(const Config& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace ksfft
