#include "ksfft/dft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "ksfft/error.hpp"
#include "ksfft/numtheory.hpp"

namespace ksfft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(std::span<const cplx> input) {
  if (input.empty()) throw Error(ErrorCode::InvalidArgument, "empty buffer");
  for (const cplx& v : input) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::NonFinite, "NaN or Inf in DFT input");
    }
  }
}

unsigned log2_exact(std::size_t n) {
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// In-place iterative radix-2 with sign -1 (forward) or +1 (unnormalized inverse).
void radix2_inplace(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const double theta = sign * kTwoPi / static_cast<double>(len);
    const cplx step = std::polar(1.0, theta);
    // Twiddles by recurrence, refreshed from exact trig every 64 steps.
    std::vector<cplx> tw(half);
    for (std::size_t k = 0; k < half; ++k) {
      tw[k] = (k % 64 == 0) ? std::polar(1.0, theta * static_cast<double>(k)) : tw[k - 1] * step;
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

struct ChirpKernel {
  std::size_t conv_len;
  std::vector<cplx> chirp;        // e^{-i pi j^2 / n}
  std::vector<cplx> kernel_fft;   // FFT of the conjugate chirp, wrapped
};

std::shared_ptr<const ChirpKernel> chirp_kernel(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const ChirpKernel>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto k = std::make_shared<ChirpKernel>();
  k->conv_len = next_pow2(2 * n - 1);
  k->chirp.resize(n);
  const u64 two_n = 2 * static_cast<u64>(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the phase argument small and exact.
    const u64 sq = mul_mod(j, j, two_n);
    k->chirp[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n));
  }
  std::vector<cplx> b(k->conv_len, cplx{});
  b[0] = std::conj(k->chirp[0]);
  for (std::size_t j = 1; j < n; ++j) {
    b[j] = std::conj(k->chirp[j]);
    b[k->conv_len - j] = b[j];
  }
  radix2_inplace(b, -1);
  k->kernel_fft = std::move(b);
  std::lock_guard lock(mu);
  return cache.emplace(n, std::move(k)).first->second;
}

}  // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

cplx unit_phase(std::uint64_t num, std::uint64_t den) {
  const u64 r = num % den;
  return std::polar(1.0, kTwoPi * (static_cast<double>(r) / static_cast<double>(den)));
}

std::uint64_t dft_cost(std::size_t n) {
  if (n <= 1) return 0;
  if (is_pow2(n)) return n * log2_exact(n);
  const std::size_t L = next_pow2(2 * n - 1);
  return 2 * L * log2_exact(L) + 2 * n + L;
}

ComplexBuffer dft_radix2(std::span<const cplx> input, OpCounter* counter) {
  require_finite(input);
  if (!is_pow2(input.size())) throw Error(ErrorCode::InvalidArgument, "radix-2 length must be a power of two");
  ComplexBuffer a(input.begin(), input.end());
  radix2_inplace(a, -1);
  if (counter) counter->add(dft_cost(a.size()));
  return a;
}

ComplexBuffer dft_chirpz(std::span<const cplx> input, OpCounter* counter) {
  require_finite(input);
  const std::size_t n = input.size();
  if (n == 1) return ComplexBuffer(input.begin(), input.end());
  const auto kern = chirp_kernel(n);
  std::vector<cplx> a(kern->conv_len, cplx{});
  for (std::size_t j = 0; j < n; ++j) a[j] = input[j] * kern->chirp[j];
  radix2_inplace(a, -1);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= kern->kernel_fft[j];
  radix2_inplace(a, +1);
  const double scale = 1.0 / static_cast<double>(kern->conv_len);
  ComplexBuffer out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = a[j] * scale * kern->chirp[j];
  if (counter) {
    const std::size_t L = kern->conv_len;
    counter->add(2 * L * log2_exact(L) + 2 * n + L);
  }
  return out;
}

ComplexBuffer dft_forward(std::span<const cplx> input, OpCounter* counter) {
  if (is_pow2(input.size())) return dft_radix2(input, counter);
  return dft_chirpz(input, counter);
}

ComplexBuffer dft_inverse(std::span<const cplx> input, OpCounter* counter) {
  require_finite(input);
  // conj(F(conj x)) / n
  ComplexBuffer c(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) c[i] = std::conj(input[i]);
  ComplexBuffer out = dft_forward(c, counter);
  const double scale = 1.0 / static_cast<double>(input.size());
  for (cplx& v : out) v = std::conj(v) * scale;
  return out;
}

ComplexBuffer dft_direct(std::span<const cplx> input, std::size_t cap) {
  require_finite(input);
  const std::size_t n = input.size();
  if (n > cap) {
    throw Error(ErrorCode::OracleCapExceeded,
                "direct DFT length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
  ComplexBuffer out(n, cplx{});
  for (std::size_t f = 0; f < n; ++f) {
    cplx acc{};
    for (std::size_t t = 0; t < n; ++t) {
      acc += input[t] * std::conj(unit_phase(mul_mod(f, t, n), n));
    }
    out[f] = acc;
  }
  return out;
}

}  // namespace ksfft
