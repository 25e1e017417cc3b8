#pragma once

// Tunables for planning, peeling, verification and escalation.
//
// File format: one `key = value` per line, `#` starts a comment. Keys match
// the field names below; `moduli` takes a comma list (e.g. `7,11,13`).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ksfft {

enum class ViewMode { Dense, Recursive };

struct Config {
  double alpha = 15.0;
  double lambda_threshold = 0.1;   // recursion child-load cutoff; adaptive-moduli switch
  double peel_load_max = 0.3;      // k / min(m) above this never enters the fast path
  int t = 3;                       // verification views
  double rho_sparse = 0.3;
  double rho_dense = 0.5;
  std::vector<std::uint64_t> moduli;  // explicit identification moduli
  bool identity_hash = false;      // a = 1, b = 0, unit shift step
  bool composite_moduli = false;   // each modulus a product of two primes near N^{1/4}
  int shift_count = 3;
  double singleton_tol = 1e-6;
  double noise_floor_rel = 1e-9;
  double verify_eps_rel = 1e-6;
  double tau_rel = 1e-6;
  double round_factor = 4.0;
  int max_rehash = 2;
  int max_extra_verify_views = 2;
  ViewMode view_mode = ViewMode::Recursive;
  ViewMode verify_mode = ViewMode::Recursive;
  int max_depth = 0;               // 0 -> ceil(log2 log2 N)
  std::uint64_t dense_cap = std::uint64_t{1} << 25;
  int threads = 0;                 // 0 -> hardware concurrency
  bool force_fallback = false;
  bool gate_certificate = true;    // record per-frequency gated pairs

  /// Applies one `key = value` assignment. Throws InvalidArgument on an
  /// unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
};

Config parse_config(const std::string& text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

int resolve_threads(const Config& cfg);

}  // namespace ksfft
