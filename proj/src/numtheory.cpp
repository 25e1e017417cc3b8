#include "ksfft/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ksfft/error.hpp"

namespace ksfft {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OracleCapExceeded: return "OracleCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateFrequency: return "DuplicateFrequency";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DenseRegime: return "DenseRegime";
    case ErrorCode::StrideMismatch: return "StrideMismatch";
    case ErrorCode::DuplicateConflict: return "DuplicateConflict";
  }
  return "Unknown";
}

EgcdResult egcd(i64 a, i64 b) {
  if (a == 0 && b == 0) throw Error(ErrorCode::InvalidArgument, "egcd(0, 0)");
  i64 old_r = a, r = b;
  i64 old_s = 1, s = 0;
  i64 old_t = 0, t = 1;
  while (r != 0) {
    const i64 q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

u64 gcd(u64 a, u64 b) {
  while (b != 0) a = std::exchange(b, a % b);
  return a;
}

i64 mod_inverse(i64 a, i64 m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be >= 2");
  const auto [g, x, y] = egcd(static_cast<i64>(norm_mod(a, m)), m);
  (void)y;
  if (g != 1) {
    throw Error(ErrorCode::NotCoprime,
                "gcd(" + std::to_string(a) + ", " + std::to_string(m) + ") = " + std::to_string(g));
  }
  return static_cast<i64>(norm_mod(x, static_cast<u64>(m)));
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 checked_mul(u64 a, u64 b) {
  const u128 p = static_cast<u128>(a) * b;
  if (p > static_cast<u128>(INT64_MAX)) {
    throw Error(ErrorCode::Overflow, std::to_string(a) + " * " + std::to_string(b));
  }
  return static_cast<u64>(p);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kSmall) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // The first twelve primes are a complete witness set below 3.3e24.
  for (u64 a : kSmall) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 garner2(u64 r1, u64 r2, u64 m1, u64 m2) {
  if (r1 >= m1 || r2 >= m2) throw Error(ErrorCode::OutOfRange, "residue not below its modulus");
  const auto gamma = static_cast<u64>(mod_inverse(static_cast<i64>(m1), static_cast<i64>(m2)));
  const u64 diff = norm_mod(static_cast<i64>(r2) - static_cast<i64>(r1), m2);
  const u64 u2 = mul_mod(diff, gamma, m2);
  return r1 + u2 * m1;
}

ModTriple::ModTriple(u64 m1, u64 m2, u64 m3) : m1_(m1), m2_(m2), m3_(m3) {
  if (m1 < 2 || m2 < 2 || m3 < 2) throw Error(ErrorCode::InvalidArgument, "moduli must be >= 2");
  if (gcd(m1, m2) != 1 || gcd(m1, m3) != 1 || gcd(m2, m3) != 1) {
    throw Error(ErrorCode::NotCoprime, "moduli " + std::to_string(m1) + ", " +
                                           std::to_string(m2) + ", " + std::to_string(m3) +
                                           " are not pairwise coprime");
  }
  M_ = checked_mul(checked_mul(m1, m2), m3);
  gamma12_ = static_cast<u64>(mod_inverse(static_cast<i64>(m1 % m2), static_cast<i64>(m2)));
  gamma23_ = static_cast<u64>(mod_inverse(static_cast<i64>(mul_mod(m1, m2, m3)), static_cast<i64>(m3)));
}

Garner3 ModTriple::garner3(u64 r1, u64 r2, u64 r3) const {
  if (r1 >= m1_ || r2 >= m2_ || r3 >= m3_) {
    throw Error(ErrorCode::OutOfRange, "residue not below its modulus");
  }
  const u64 u2 = mul_mod(norm_mod(static_cast<i64>(r2) - static_cast<i64>(r1), m2_), gamma12_, m2_);
  // r1 + u2*m1 < m1*m2, reduced mod m3 before the subtraction.
  const u64 partial = (r1 + u2 * m1_) % m3_;
  const u64 u3 = mul_mod(norm_mod(static_cast<i64>(r3) - static_cast<i64>(partial), m3_), gamma23_, m3_);
  return {u2, u3, r1 + u2 * m1_ + u3 * m1_ * m2_};
}

std::vector<u64> find_coprime_moduli(u64 target, int count, u64 min_product,
                                     const std::set<u64>& exclusions) {
  if (target < 2) throw Error(ErrorCode::InvalidArgument, "target must be >= 2");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  const u64 radius = 10 * target;
  const auto floor = static_cast<u64>(std::ceil(static_cast<double>(target) / std::sqrt(2.0)));

  auto admissible = [&](u64 c, const std::vector<u64>& chosen) {
    if (c < 2 || c < floor || !is_prime(c) || exclusions.count(c) != 0) return false;
    for (u64 e : exclusions) {
      if (gcd(c, e) != 1) return false;
    }
    for (u64 p : chosen) {
      if (gcd(c, p) != 1) return false;
    }
    return true;
  };
  auto product_reaches = [&](const std::vector<u64>& chosen) {
    u128 p = 1;
    for (u64 c : chosen) {
      p *= c;
      if (p >= min_product) return true;
    }
    return p >= min_product;
  };

  std::vector<u64> chosen;
  for (u64 d = 0; d <= radius; ++d) {
    const u64 above = target + d;
    const bool has_below = d != 0 && d < target;
    for (u64 c : {above, has_below ? target - d : u64{0}}) {
      if (c == 0 || !admissible(c, chosen)) continue;
      if (static_cast<int>(chosen.size()) == count) {
        // Full but short of the product: trade the smallest for a larger one.
        auto smallest = std::min_element(chosen.begin(), chosen.end());
        if (c <= *smallest) continue;
        *smallest = c;
      } else {
        chosen.push_back(c);
      }
      if (static_cast<int>(chosen.size()) == count && product_reaches(chosen)) return chosen;
    }
  }
  throw Error(ErrorCode::SearchExhausted,
              "no " + std::to_string(count) + " coprime primes near " + std::to_string(target));
}

std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> out;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e != 0) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int coprime_divisor_capacity(u64 n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be >= 2");
  return static_cast<int>(factorize(n).size());
}

}  // namespace ksfft
