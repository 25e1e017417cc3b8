#pragma once

// Exact integer and modular arithmetic used by moduli planning and CRT
// reconstruction. Products are formed in 128-bit intermediates.

#include <cstdint>
#include <set>
#include <vector>

namespace ksfft {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

struct EgcdResult {
  i64 g;
  i64 x;
  i64 y;
};

/// a*x + b*y = g with g = gcd(a, b) >= 0. Not both of a, b may be zero.
EgcdResult egcd(i64 a, i64 b);

u64 gcd(u64 a, u64 b);

/// Inverse of a modulo m in [1, m). Throws NotCoprime when gcd(a, m) != 1.
i64 mod_inverse(i64 a, i64 m);

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

/// Mathematical mod: result in [0, m) for any sign of a.
inline u64 norm_mod(i64 a, u64 m) {
  const i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

u64 pow_mod(u64 base, u64 exp, u64 m);

/// a*b, throwing Overflow if it does not fit in 63 bits.
u64 checked_mul(u64 a, u64 b);

/// Deterministic Miller-Rabin; exact for every 64-bit input.
bool is_prime(u64 n);

/// Unique f in [0, m1*m2) with f = r1 (mod m1) and f = r2 (mod m2).
u64 garner2(u64 r1, u64 r2, u64 m1, u64 m2);

struct Garner3 {
  u64 u2;
  u64 u3;
  u64 f;
};

/// Three pairwise-coprime moduli with the Garner constants precomputed.
class ModTriple {
 public:
  ModTriple(u64 m1, u64 m2, u64 m3);

  u64 m1() const { return m1_; }
  u64 m2() const { return m2_; }
  u64 m3() const { return m3_; }
  u64 m(int i) const { return i == 0 ? m1_ : (i == 1 ? m2_ : m3_); }
  u64 gamma12() const { return gamma12_; }
  u64 gamma23() const { return gamma23_; }
  u64 M() const { return M_; }

  /// Mixed-radix reconstruction f = r1 + u2*m1 + u3*m1*m2.
  Garner3 garner3(u64 r1, u64 r2, u64 r3) const;

 private:
  u64 m1_, m2_, m3_;
  u64 gamma12_;
  u64 gamma23_;
  u64 M_;
};

/// `count` pairwise-coprime primes nearest `target`, searched outward
/// (above before below at equal distance), never below target/sqrt(2).
/// The product must reach `min_product`; moduli in `exclusions` are skipped
/// and every result is coprime to them. Throws SearchExhausted past a
/// radius of 10*target.
std::vector<u64> find_coprime_moduli(u64 target, int count, u64 min_product,
                                     const std::set<u64>& exclusions = {});

/// Number of distinct prime factors of n: the most pairwise-coprime
/// non-trivial moduli obtainable from divisors of n.
int coprime_divisor_capacity(u64 n);

/// Prime factorization as (prime, exponent) pairs, ascending.
std::vector<std::pair<u64, int>> factorize(u64 n);

}  // namespace ksfft
