#pragma once

// Complex DFT engines for arbitrary lengths. Forward transforms are
// unnormalized; the inverse carries the 1/n factor.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ksfft {

using cplx = std::complex<double>;
using ComplexBuffer = std::vector<cplx>;

/// Tally of complex multiply-adds. A radix-2 transform of length L is
/// charged L*log2(L).
struct OpCounter {
  std::uint64_t ops = 0;
  void add(std::uint64_t n) { ops += n; }
};

inline constexpr std::size_t kDefaultOracleCap = 8192;

/// Radix-2 for powers of two, chirp-z otherwise.
ComplexBuffer dft_forward(std::span<const cplx> input, OpCounter* counter = nullptr);
ComplexBuffer dft_inverse(std::span<const cplx> input, OpCounter* counter = nullptr);

/// Literal O(n^2) evaluation of the definition; testing oracle.
ComplexBuffer dft_direct(std::span<const cplx> input, std::size_t cap = kDefaultOracleCap);

/// Engines exposed for equivalence testing.
ComplexBuffer dft_radix2(std::span<const cplx> input, OpCounter* counter = nullptr);
ComplexBuffer dft_chirpz(std::span<const cplx> input, OpCounter* counter = nullptr);

/// Op charge of dft_forward for length n, as a pure function of n.
std::uint64_t dft_cost(std::size_t n);

/// e^{2 pi i num/den} with num reduced exactly modulo den first.
cplx unit_phase(std::uint64_t num, std::uint64_t den);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

}  // namespace ksfft
