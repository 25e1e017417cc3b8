#include "doctest.h"
#include "ksfft/error.hpp"
#include "ksfft/experiments.hpp"
#include "ksfft/views.hpp"
#include "test_util.hpp"

using namespace ksfft;

namespace {

double max_oracle_gap(const ViewSpectrum& v, const SparseSpectrum& s) {
  double d = 0;
  for (int sh = 0; sh < v.shift_count(); ++sh) {
    for (u64 r = 0; r < v.m(); ++r) {
      d = std::max(d, std::abs(v.shifts[sh][r] - oracle::alias_sum(s, v.params, v.grid, r, sh)));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("single tone alias with identity params") {
  const SparseSpectrum s(1001, {{5, {1, 0}}});
  const ViewParams p{7, 1, 0, 3, 1};
  Config cfg;
  cfg.view_mode = ViewMode::Dense;
  const ViewSpectrum v = build_view(*synthesize(s), p, 1001, cfg, {});
  for (int sh = 0; sh < 3; ++sh) {
    for (u64 r = 0; r < 7; ++r) {
      const cplx want = r == 5 ? oracle::expi(5.0L * sh / 1001) : cplx{};
      CHECK(std::abs(v.shifts[sh][r] - want) < 1e-12);
    }
  }
}

TEST_CASE("toy spectrum occupies bins 0 and 6 of the first view") {
  const SparseSpectrum s(1001, {{7, {1, 0}}, {41, {1, 0}}});
  const ViewSpectrum v = build_view(*synthesize(s), ViewParams{7, 1, 0, 3, 1}, 1001);
  const ResidueSet rs = extract_residues(v, 30, 1e-9);
  REQUIRE(rs.residues.size() == 2);
  CHECK(rs.contains(0));
  CHECK(rs.contains(6));
}

TEST_CASE("FFT path view equals the alias-sum oracle under random hashing") {
  KeyedStream rng(21, "views");
  const u64 M = 997 * 1009 * 991;
  for (int trial = 0; trial < 6; ++trial) {
    const SparseSpectrum s = random_spectrum(M, 8, rng);
    for (u64 m : {997, 1009, 991}) {
      const ViewParams p = draw_view(rng, m, M, 3, false);
      const ViewSpectrum v = build_view(*synthesize(s), p, M);
      CHECK(max_oracle_gap(v, s) < 1e-9);
      CHECK(max_oracle_gap(predict_view(s, p, M), s) < 1e-9);
      // occupied bins never exceed the number of tones
      std::size_t occupied = 0;
      for (const cplx& y : v.shifts[0]) occupied += std::abs(y) > 1e-9;
      CHECK(occupied <= s.size());
    }
  }
}

TEST_CASE("shift magnitudes agree for singleton bins") {
  const u64 M = 7 * 11 * 13;
  const SparseSpectrum s(M, {{3, {0.5, 2}}});
  KeyedStream rng(1, "shift");
  const ViewParams p = draw_view(rng, 11, M, 3, false);
  const ViewSpectrum v = build_view(*synthesize(s), p, M);
  const u64 r = p.hash(3);
  CHECK(std::abs(std::abs(v.shifts[1][r]) - std::abs(v.shifts[0][r])) < 1e-9);
  CHECK(std::abs(std::abs(v.shifts[2][r]) - std::abs(v.shifts[0][r])) < 1e-9);
}

TEST_CASE("recursive mode on composite lengths matches the dense view") {
  // m = 35 * 33 divides the grid and splits into coprime children
  const u64 m = 5 * 7 * 3 * 11, M = m * 17;
  KeyedStream rng(8, "recursive-view");
  const SparseSpectrum s = random_spectrum(M, 1, rng);
  const ViewParams p = draw_view(rng, m, M, 3, false);
  Config cfg;
  cfg.lambda_threshold = 0.5;
  ViewBuildOptions opts{ViewMode::Recursive, 1, 1, 3, 5};
  const ViewSpectrum rec = build_view(*synthesize(s), p, M, cfg, opts);
  CHECK(rec.representation == Representation::Sparse);
  CHECK(max_oracle_gap(rec, s) < 1e-9);
}

TEST_CASE("build_view preconditions") {
  const auto src = synthesize(SparseSpectrum(1001, {{1, {1, 0}}}));
  CHECK_THROWS_AS(build_view(*src, ViewParams{10, 1, 0, 3, 1}, 1001), Error);
  try {
    build_view(*src, ViewParams{10, 1, 0, 3, 1}, 1001);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StrideMismatch);
  }
  CHECK_THROWS_AS(build_view(*src, ViewParams{7, 7, 0, 3, 1}, 1001), Error);
}

TEST_CASE("extract_residues ordering") {
  ViewSpectrum v;
  v.params = ViewParams{8, 1, 0, 2, 1};
  v.grid = 8;
  v.shifts.assign(2, ComplexBuffer(8, cplx{}));
  const double mags[8] = {0, 3, 1, 3, 0, 2, 1, 0.5};
  for (int r = 0; r < 8; ++r) v.shifts[0][r] = mags[r];
  const ResidueSet top = extract_residues(v, 4, 1e-12);
  REQUIRE(top.residues.size() == 4);
  CHECK(top.residues[0].first == 1);
  CHECK(top.residues[1].first == 3);
  CHECK(top.residues[2].first == 5);
  CHECK(top.residues[3].first == 2);
  CHECK(extract_residues(ViewSpectrum{v.params, 8, Representation::Dense,
                                      {ComplexBuffer(8), ComplexBuffer(8)}, 0},
                         4, 0.0)
            .residues.empty());
  CHECK_THROWS_AS(extract_residues(v, 0, 0.0), Error);
}

TEST_CASE("view_energy identities") {
  const u64 M = 7 * 11 * 13;
  KeyedStream rng(2, "energy");
  const ViewParams p = draw_view(rng, 13, M, 3, false);
  CHECK(view_energy(*synthesize(SparseSpectrum(M, {})), p, M) == 0.0);
  const SparseSpectrum one(M, {{100, {3, 4}}});
  CHECK(view_energy(*synthesize(one), p, M) == doctest::Approx(13 * 25.0));
  const SparseSpectrum two(M, {{100, {3, 4}}, {113, {1, -1}}});
  const ViewSpectrum v = build_view(*synthesize(two), p, M);
  double bins = 0;
  for (const cplx& y : v.shifts[0]) bins += std::norm(y);
  CHECK(std::abs(view_energy(*synthesize(two), p, M) - 13.0 * bins) < 1e-9);
}
