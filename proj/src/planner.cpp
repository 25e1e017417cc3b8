#include "ksfft/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksfft/error.hpp"
#include "ksfft/rng.hpp"

namespace ksfft {

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Sparse: return "Sparse";
    case Regime::Moderate: return "Moderate";
    case Regime::Dense: return "Dense";
  }
  return "Unknown";
}

const char* to_string(PlanViolation v) noexcept {
  switch (v) {
    case PlanViolation::NotCoprime: return "NotCoprime";
    case PlanViolation::ProductTooSmall: return "ProductTooSmall";
    case PlanViolation::ModulusMismatch: return "ModulusMismatch";
    case PlanViolation::NonInvertibleDilation: return "NonInvertibleDilation";
    case PlanViolation::OffsetOutOfRange: return "OffsetOutOfRange";
    case PlanViolation::BadShiftCount: return "BadShiftCount";
    case PlanViolation::TripleMismatch: return "TripleMismatch";
  }
  return "Unknown";
}

RegimeParams classify_regime(u64 N, u64 k, const Config& cfg) {
  if (N < 4) throw Error(ErrorCode::InvalidArgument, "N must be >= 4");
  RegimeParams p;
  p.rho = static_cast<double>(k) / std::sqrt(static_cast<double>(N));
  if (p.rho < cfg.rho_sparse) p.regime = Regime::Sparse;
  else if (p.rho < cfg.rho_dense) p.regime = Regime::Moderate;
  else p.regime = Regime::Dense;
  p.alpha = cfg.alpha;
  p.lambda_threshold = cfg.lambda_threshold;
  return p;
}

u64 ViewParams::unhash(u64 bin) const {
  const auto a_inv = static_cast<u64>(mod_inverse(static_cast<i64>(a()), static_cast<i64>(m)));
  return mul_mod(a_inv, norm_mod(static_cast<i64>(bin) - static_cast<i64>(b), m), m);
}

namespace {

u64 draw_invertible(KeyedStream& s, u64 grid) {
  if (grid <= 2) return 1;
  for (;;) {
    const u64 v = 1 + s.uniform(grid - 1);
    if (gcd(v, grid) == 1) return v;
  }
}

std::vector<u64> choose_moduli(u64 N, u64 k, const RegimeParams& regime, const Config& cfg) {
  if (!cfg.moduli.empty()) {
    if (cfg.moduli.size() != 3) throw Error(ErrorCode::InvalidArgument, "moduli override needs exactly 3 values");
    return cfg.moduli;
  }
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  if (cfg.composite_moduli) {
    const auto q = std::max<u64>(2, static_cast<u64>(std::ceil(std::sqrt(sqrt_n))));
    auto primes = find_coprime_moduli(q, 6, N);
    std::sort(primes.begin(), primes.end());
    return {primes[0] * primes[5], primes[1] * primes[4], primes[2] * primes[3]};
  }
  double target = std::ceil(sqrt_n);
  const bool adaptive = regime.regime == Regime::Moderate || regime.rho >= cfg.lambda_threshold;
  if (adaptive && k >= 2) {
    const double kd = static_cast<double>(k);
    target = std::max(target, std::ceil(10.0 * kd * std::log2(kd)));
  }
  auto m = find_coprime_moduli(static_cast<u64>(target), 3, N);
  // two views alone must identify every f < N for the 2-of-3 gate: largest
  // first, and trade the smallest for the next prime up until m1*m2 >= N
  std::sort(m.rbegin(), m.rend());
  while (static_cast<u128>(m[0]) * m[1] < N) {
    u64 p = m[0] + 1;
    while (!is_prime(p)) ++p;
    m[2] = p;
    std::sort(m.rbegin(), m.rend());
  }
  return m;
}

}  // namespace

ViewParams draw_view(KeyedStream& stream, u64 m, u64 grid, int shift_count, bool identity) {
  ViewParams v;
  v.m = m;
  v.shift_count = shift_count;
  if (identity) return v;
  v.sigma = draw_invertible(stream, grid);
  v.b = stream.uniform(m);
  v.tau = draw_invertible(stream, grid);
  return v;
}

u64 ModuliPlan::min_modulus() const {
  return std::min({id_views[0].m, id_views[1].m, id_views[2].m});
}

double ModuliPlan::load_factor() const {
  return static_cast<double>(k) / static_cast<double>(min_modulus());
}

ModuliPlan make_plan(u64 N, u64 k, int t, u64 seed, const Config& cfg) {
  ModuliPlan plan;
  plan.regime = classify_regime(N, k, cfg);
  if (plan.regime.regime == Regime::Dense) {
    throw Error(ErrorCode::DenseRegime, "rho = " + std::to_string(plan.regime.rho) + " >= " +
                                            std::to_string(cfg.rho_dense));
  }
  const auto moduli = choose_moduli(N, k, plan.regime, cfg);
  plan.triple = ModTriple(moduli[0], moduli[1], moduli[2]);
  plan.M = plan.triple.M();
  plan.N = N;
  plan.k = k;
  plan.rng_seed = seed;
  for (int i = 0; i < 3; ++i) {
    KeyedStream s(seed, "id-view-" + std::to_string(i));
    plan.id_views[i] = draw_view(s, moduli[i], plan.M, cfg.shift_count, cfg.identity_hash);
  }
  extend_verification(plan, t, cfg);
  return plan;
}

void extend_verification(ModuliPlan& plan, int extra, const Config& cfg) {
  const int start = static_cast<int>(plan.verify_views.size());
  for (int v = start; v < start + extra; ++v) {
    KeyedStream s(plan.rng_seed, "verify-view-" + std::to_string(v));
    plan.verify_views.push_back(
        draw_view(s, plan.triple.m(v % 3), plan.M, cfg.shift_count, cfg.identity_hash));
  }
}

std::vector<PlanViolation> validate_plan(const ModuliPlan& plan) {
  std::vector<PlanViolation> out;
  auto add = [&](PlanViolation v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  const auto& iv = plan.id_views;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (gcd(iv[i].m, iv[j].m) != 1) add(PlanViolation::NotCoprime);
    }
  }
  const u128 product = static_cast<u128>(iv[0].m) * iv[1].m * iv[2].m;
  if (product != plan.M) add(PlanViolation::TripleMismatch);
  if (plan.triple.m1() != iv[0].m || plan.triple.m2() != iv[1].m || plan.triple.m3() != iv[2].m) {
    add(PlanViolation::TripleMismatch);
  }
  if (product < plan.N) add(PlanViolation::ProductTooSmall);
  auto check_view = [&](const ViewParams& v) {
    if (v.m < 2 || plan.M % v.m != 0) {
      add(PlanViolation::ModulusMismatch);
      return;
    }
    if (gcd(v.sigma, plan.M) != 1 || gcd(v.tau, plan.M) != 1) add(PlanViolation::NonInvertibleDilation);
    if (v.b >= v.m) add(PlanViolation::OffsetOutOfRange);
    if (v.shift_count < 2 || v.shift_count > 3) add(PlanViolation::BadShiftCount);
  };
  for (const auto& v : iv) check_view(v);
  for (const auto& v : plan.verify_views) check_view(v);
  return out;
}

ModuliPlan rehash(const ModuliPlan& plan, u64 seed) {
  ModuliPlan out = plan;
  out.rehash_round = plan.rehash_round + 1;
  for (int i = 0; i < 3; ++i) {
    KeyedStream s(seed, "rehash/id-view-" + std::to_string(i));
    out.id_views[i] = draw_view(s, plan.id_views[i].m, plan.M, plan.id_views[i].shift_count, false);
  }
  return out;
}

}  // namespace ksfft
