#include <cmath>

#include "doctest.h"
#include "ksfft/error.hpp"
#include "ksfft/planner.hpp"

using namespace ksfft;

TEST_CASE("classify_regime thresholds") {
  auto r = classify_regime(1000000, 50);
  CHECK(r.rho == doctest::Approx(0.05));
  CHECK(r.regime == Regime::Sparse);
  CHECK(r.alpha == 15.0);
  r = classify_regime(64, 2);
  CHECK(r.rho == doctest::Approx(0.25));
  CHECK(r.regime == Regime::Sparse);
  CHECK(classify_regime(100, 6).regime == Regime::Dense);
  CHECK(classify_regime(10000, 30).regime == Regime::Moderate);
  CHECK(classify_regime(10000, 50).regime == Regime::Dense);
  CHECK_THROWS_AS(make_plan(100, 6, 3, 1), Error);
}

TEST_CASE("toy plan with moduli override") {
  Config cfg;
  cfg.moduli = {7, 11, 13};
  cfg.identity_hash = true;
  const ModuliPlan p = make_plan(64, 2, 0, 42, cfg);
  CHECK(p.M == 1001);
  CHECK(p.verify_views.empty());
  for (const auto& v : p.id_views) {
    CHECK(v.sigma == 1);
    CHECK(v.b == 0);
    CHECK(v.tau == 1);
  }
  CHECK(validate_plan(p).empty());
}

TEST_CASE("default plans") {
  const ModuliPlan p = make_plan(u64{1} << 20, 20, 3, 7);
  u64 prod = 1;
  for (const auto& v : p.id_views) {
    CHECK(is_prime(v.m));
    CHECK(std::abs(static_cast<double>(v.m) - 1024.0) < 64.0);
    prod *= v.m;
  }
  CHECK(prod == p.M);
  CHECK(p.M >= (u64{1} << 20));
  CHECK(p.verify_views.size() == 3);
  CHECK(validate_plan(p).empty());

  const ModuliPlan q = make_plan(1000000, 200, 0, 7);
  CHECK(q.regime.regime == Regime::Sparse);
  const double target = 10.0 * 200 * std::log2(200.0);
  for (const auto& v : q.id_views) {
    CHECK(std::abs(static_cast<double>(v.m) - target) < 0.05 * target);
    CHECK(200.0 / static_cast<double>(v.m) <= 1.05 / (10.0 * std::log2(200.0)));
  }
}

TEST_CASE("view params hash and unhash") {
  KeyedStream s(3, "test");
  for (u64 m : {7, 11, 997}) {
    const u64 M = 7 * 11 * 997;
    const ViewParams v = draw_view(s, m, M, 3, false);
    CHECK(gcd(v.sigma, M) == 1);
    CHECK(gcd(v.tau, M) == 1);
    CHECK(v.a() >= 1);
    CHECK(v.a() <= m - 1);
    for (u64 f = 0; f < 3 * m; f += 7) CHECK(v.unhash(v.hash(f)) == f % m);
  }
}

TEST_CASE("plan determinism and domain independence") {
  const ModuliPlan a = make_plan(u64{1} << 16, 10, 3, 99);
  const ModuliPlan b = make_plan(u64{1} << 16, 10, 3, 99);
  CHECK(a.id_views == b.id_views);
  CHECK(a.verify_views == b.verify_views);
  const ModuliPlan c = make_plan(u64{1} << 16, 10, 7, 99);
  CHECK(c.id_views == a.id_views);
  for (int v = 0; v < 3; ++v) CHECK(c.verify_views[v] == a.verify_views[v]);
  const ModuliPlan d = make_plan(u64{1} << 16, 10, 3, 100);
  CHECK_FALSE(d.id_views == a.id_views);
}

TEST_CASE("validate_plan flags violations") {
  Config cfg;
  cfg.moduli = {7, 11, 13};
  ModuliPlan p = make_plan(64, 2, 1, 1, cfg);
  ModuliPlan same = p;
  same.id_views[1].m = 7;
  const auto v1 = validate_plan(same);
  CHECK(std::find(v1.begin(), v1.end(), PlanViolation::NotCoprime) != v1.end());
  ModuliPlan small = p;
  small.N = 5000;
  const auto v2 = validate_plan(small);
  CHECK(std::find(v2.begin(), v2.end(), PlanViolation::ProductTooSmall) != v2.end());
  ModuliPlan off = p;
  off.verify_views[0].b = off.verify_views[0].m;
  const auto v3 = validate_plan(off);
  CHECK(std::find(v3.begin(), v3.end(), PlanViolation::OffsetOutOfRange) != v3.end());
}

TEST_CASE("rehash keeps moduli and verification views") {
  const ModuliPlan p = make_plan(u64{1} << 16, 10, 3, 5);
  const ModuliPlan r1 = rehash(p, 77), r2 = rehash(p, 77);
  CHECK(r1.id_views == r2.id_views);
  CHECK(r1.verify_views == p.verify_views);
  CHECK(r1.rehash_round == 1);
  for (int i = 0; i < 3; ++i) CHECK(r1.id_views[i].m == p.id_views[i].m);
  CHECK_FALSE(r1.id_views == p.id_views);
  CHECK(validate_plan(r1).empty());
}
