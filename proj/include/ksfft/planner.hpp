#pragma once

// Coverage-adaptive moduli selection and per-view hash parameter draws.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksfft/config.hpp"
#include "ksfft/numtheory.hpp"
#include "ksfft/rng.hpp"

namespace ksfft {

enum class Regime { Sparse, Moderate, Dense };
const char* to_string(Regime r) noexcept;

struct RegimeParams {
  double rho = 0.0;
  Regime regime = Regime::Sparse;
  double alpha = 15.0;
  double lambda_threshold = 0.1;
};

RegimeParams classify_regime(u64 N, u64 k, const Config& cfg = {});

/// One decimated view. Its residue hash is (a*f + b) mod m with
/// a = sigma mod m; shift s observes the signal at offset s*tau on the grid.
struct ViewParams {
  u64 m = 0;
  u64 sigma = 1;
  u64 b = 0;
  int shift_count = 3;
  u64 tau = 1;

  u64 a() const { return sigma % m; }
  u64 hash(u64 f) const { return (mul_mod(a(), f % m, m) + b) % m; }
  /// Frequency residue f mod m for a hashed bin.
  u64 unhash(u64 bin) const;
  u64 shift(int s, u64 grid) const { return mul_mod(static_cast<u64>(s), tau, grid); }

  friend bool operator==(const ViewParams&, const ViewParams&) = default;
};

/// Draws dilation, offset and shift step for modulus m on a grid of length
/// `grid` from `stream`. Identity draws give sigma = tau = 1, b = 0.
ViewParams draw_view(KeyedStream& stream, u64 m, u64 grid, int shift_count, bool identity);

struct ModuliPlan {
  std::array<ViewParams, 3> id_views;
  std::vector<ViewParams> verify_views;
  ModTriple triple{2, 3, 5};
  u64 M = 0;
  u64 N = 0;
  u64 k = 0;
  RegimeParams regime;
  u64 rng_seed = 0;
  int rehash_round = 0;

  u64 min_modulus() const;
  double load_factor() const;
};

/// Throws DenseRegime when rho >= rho_dense, SearchExhausted if no moduli.
ModuliPlan make_plan(u64 N, u64 k, int t, u64 seed, const Config& cfg = {});

/// Adds verification views (domain continues after the existing ones).
void extend_verification(ModuliPlan& plan, int extra, const Config& cfg = {});

enum class PlanViolation {
  NotCoprime,
  ProductTooSmall,
  ModulusMismatch,
  NonInvertibleDilation,
  OffsetOutOfRange,
  BadShiftCount,
  TripleMismatch,
};
const char* to_string(PlanViolation v) noexcept;

std::vector<PlanViolation> validate_plan(const ModuliPlan& plan);

/// Fresh identification hash parameters for the same moduli, drawn from
/// the "rehash" domains under `seed`. Verification views are untouched.
ModuliPlan rehash(const ModuliPlan& plan, u64 seed);

}  // namespace ksfft
