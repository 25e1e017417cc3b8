#include "doctest.h"
#include "ksfft/experiments.hpp"
#include "ksfft/verification.hpp"

using namespace ksfft;

namespace {

struct Fixture {
  Config cfg;
  ModuliPlan plan;
  SparseSpectrum truth;
  std::shared_ptr<const SignalSource> source;

  Fixture(u64 k, int t, u64 seed) {
    cfg.moduli = {997, 1009, 991};
    plan = make_plan(1000000, k, t, seed, cfg);
    KeyedStream rng(seed, "verification-fixture");
    truth = random_spectrum(plan.M, k, rng);
    source = synthesize(truth);
  }
};

}  // namespace

TEST_CASE("Parseval identity under view normalization") {
  Fixture fx(10, 1, 3);
  const ViewParams& p = fx.plan.verify_views[0];
  const ViewSpectrum v = build_view(*fx.source, p, fx.plan.M);
  double bins = 0;
  for (const cplx& y : v.shifts[0]) bins += std::norm(y);
  CHECK(std::abs(view_energy(*fx.source, p, fx.plan.M) / p.m - bins) < 1e-9);
}

TEST_CASE("parseval_check") {
  Fixture fx(10, 1, 4);
  const ViewParams& p = fx.plan.verify_views[0];
  CHECK(parseval_check(*fx.source, p, fx.plan.M, fx.truth, 1e-6).value < 1e-9);

  std::vector<SpectrumEntry> missing = fx.truth.entries();
  const double lost = std::norm(missing.back().coeff);
  missing.pop_back();
  const auto gap = parseval_check(*fx.source, p, fx.plan.M, SparseSpectrum(fx.plan.M, missing), 1e-6);
  CHECK_FALSE(gap.passed);

  const SparseSpectrum empty(fx.plan.M, {});
  const double e = view_energy(*fx.source, p, fx.plan.M) / p.m;
  CHECK(parseval_check(*fx.source, p, fx.plan.M, empty, 1e-6).value == doctest::Approx(e));
  CHECK(lost > 0);
}

TEST_CASE("residual_check") {
  Fixture fx(10, 1, 5);
  const ViewParams& p = fx.plan.verify_views[0];
  const ViewSpectrum v = build_view(*fx.source, p, fx.plan.M);
  CHECK(residual_check(v, fx.truth, 1e-6).value < 1e-9);

  std::vector<SpectrumEntry> moved = fx.truth.entries();
  const double a2 = std::norm(moved[0].coeff);
  moved[0].f = (moved[0].f + 12345) % fx.plan.M;
  const auto res = residual_check(v, SparseSpectrum(fx.plan.M, moved), 1e-6);
  CHECK_FALSE(res.passed);
  CHECK(res.value >= a2 * (1 - 1e-6));
}

TEST_CASE("verify aggregates views") {
  Fixture fx(10, 3, 6);
  const VerificationReport ok = verify(*fx.source, fx.plan, fx.truth, fx.cfg);
  CHECK(ok.overall);
  CHECK(ok.views.size() == 3);
  CHECK_FALSE(ok.unverified);

  std::vector<SpectrumEntry> bad = fx.truth.entries();
  bad[2].coeff *= 1.5;
  const VerificationReport no = verify(*fx.source, fx.plan, SparseSpectrum(fx.plan.M, bad), fx.cfg);
  CHECK_FALSE(no.overall);
  for (const auto& v : no.views) CHECK_FALSE(v.passed);

  Fixture none(10, 0, 7);
  const VerificationReport vac = verify(*none.source, none.plan, none.truth, none.cfg);
  CHECK(vac.overall);
  CHECK(vac.unverified);
}

TEST_CASE("no false alarms on correct candidates") {
  for (u64 seed = 10; seed < 40; ++seed) {
    Fixture fx(20, 3, seed);
    CHECK(verify(*fx.source, fx.plan, fx.truth, fx.cfg).overall);
  }
}

TEST_CASE("verdicts are deterministic across thread counts") {
  Fixture fx(10, 3, 8);
  Config one = fx.cfg, many = fx.cfg;
  one.threads = 1;
  many.threads = 3;
  const auto a = verify(*fx.source, fx.plan, fx.truth, one);
  const auto b = verify(*fx.source, fx.plan, fx.truth, many);
  REQUIRE(a.views.size() == b.views.size());
  for (std::size_t i = 0; i < a.views.size(); ++i) {
    CHECK(a.views[i].residual_energy == b.views[i].residual_energy);
    CHECK(a.views[i].parseval_gap == b.views[i].parseval_gap);
  }
}
