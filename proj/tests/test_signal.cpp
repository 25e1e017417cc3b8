#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ksfft/error.hpp"
#include "ksfft/experiments.hpp"
#include "ksfft/signal.hpp"
#include "test_util.hpp"

using namespace ksfft;

namespace {

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ksfft_test_" + name);
}

}  // namespace

TEST_CASE("SparseSpectrum validation") {
  const SparseSpectrum s(10, {{5, {1, 0}}, {2, {0, 1}}});
  REQUIRE(s.size() == 2);
  CHECK(s.entries()[0].f == 2);
  CHECK(s.find(5).has_value());
  CHECK_FALSE(s.find(3).has_value());
  CHECK(s.energy() == doctest::Approx(2.0));
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { SparseSpectrum(10, {{10, {1, 0}}}); }) == ErrorCode::OutOfRange);
  CHECK(code([] { SparseSpectrum(10, {{3, {1, 0}}, {3, {2, 0}}}); }) == ErrorCode::DuplicateFrequency);
  CHECK(code([] { SparseSpectrum(10, {{3, {std::nan(""), 0}}}); }) == ErrorCode::NonFinite);
  CHECK_THROWS_AS(SparseSpectrum(10, {{3, {0, 0}}}), Error);
}

TEST_CASE("synthesize") {
  const auto dc = synthesize(SparseSpectrum(8, {{0, {1, 0}}}));
  for (u64 n = 0; n < 8; ++n) CHECK(std::abs(dc->sample(n) - cplx{1, 0}) < 1e-15);

  const SparseSpectrum toy(1001, {{7, {1, 0}}, {41, {1, 0}}});
  const auto src = synthesize(toy);
  CHECK(src->grid_length() == 1001);
  for (u64 n : {0, 1, 500, 1000}) {
    const cplx want = oracle::expi(7.0L * n / 1001) + oracle::expi(41.0L * n / 1001);
    CHECK(std::abs(src->sample(n) - want) < 1e-12);
  }
  CHECK(src->sample(17) == src->sample(17));
  CHECK(synthesize(toy, 64)->original_length() == 64);
}

TEST_CASE("synthesize then dense DFT recovers the coefficients") {
  KeyedStream rng(4, "signal-test");
  const SparseSpectrum s = random_spectrum(4096, 5, rng);
  const auto x = materialize(*synthesize(s), 4096);
  const auto X = oracle::dft(x);
  double norm = std::sqrt(s.energy());
  for (u64 f = 0; f < 4096; ++f) {
    const auto c = s.find(f);
    const cplx want = c ? *c : cplx{};
    CHECK(std::abs(X[f] / 4096.0 - want) <= 1e-9 * norm);
  }
  double e = 0;
  for (auto v : x) e += std::norm(v);
  CHECK(std::abs(e - 4096.0 * s.energy()) <= 1e-9 * e);
}

TEST_CASE("from_dense zero-pads") {
  const auto src = from_dense({{1, 0}, {2, 0}, {3, 0}, {4, 0}}, 6);
  CHECK(src->grid_length() == 6);
  CHECK(src->original_length() == 4);
  CHECK(src->sample(3) == cplx{4, 0});
  CHECK(src->sample(5) == cplx{});
  const auto same = from_dense({{1, 1}, {2, 2}}, 2);
  CHECK(same->sample(1) == cplx{2, 2});
  CHECK_THROWS_AS(materialize(*same, 1), Error);
}

TEST_CASE("residual source subtracts the removed spectrum") {
  const SparseSpectrum s(64, {{3, {1, 0}}, {9, {0, 2}}});
  const auto base = synthesize(s);
  const ResidualSource r(base, SparseSpectrum(64, {{3, {1, 0}}}));
  for (u64 n = 0; n < 64; ++n) {
    CHECK(std::abs(r.sample(n) - cplx{0, 2} * oracle::expi(9.0L * n / 64)) < 1e-12);
  }
}

TEST_CASE("spectrum files round trip") {
  KeyedStream rng(9, "roundtrip");
  for (u64 k : {0, 1, 7, 40}) {
    const SparseSpectrum s = random_spectrum(100000, k, rng);
    save_spectrum(tmp("spec.json"), s);
    const SparseSpectrum back = load_spectrum(tmp("spec.json"));
    CHECK(back.grid_length() == s.grid_length());
    CHECK(back.entries() == s.entries());
  }
  CHECK_THROWS_AS(spectrum_from_json(R"({"grid_length": 8, "entries": [{"f": 8, "re": 1, "im": 0}]})"),
                  Error);
  CHECK_THROWS_AS(spectrum_from_json("{not json"), Error);
}

TEST_CASE("dense files round trip") {
  const ComplexBuffer x{{1.5, -2}, {0, 0}, {3.25, 1e-300}};
  save_dense_binary(tmp("dense.bin"), x);
  CHECK(load_dense(tmp("dense.bin")) == x);
  {
    std::ofstream out(tmp("dense.csv"));
    out << "index,re,im\n0,1.5,-2\n1,0,0\n2,3.25,1e-300\n";
  }
  CHECK(load_dense(tmp("dense.csv")) == x);
}
