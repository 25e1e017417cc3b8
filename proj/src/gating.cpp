#include "ksfft/gating.hpp"

#include <cmath>
#include <unordered_set>

#include "ksfft/rng.hpp"

namespace ksfft {

std::array<ViewParams, 3> identity_hashes(const ModTriple& triple) {
  std::array<ViewParams, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = ViewParams{triple.m(i), 1, 0, 3, 1};
  return out;
}

namespace {

inline u64 crt12(u64 r1, u64 r2, const ModTriple& t) {
  const u64 m1 = t.m1(), m2 = t.m2();
  const u64 diff = (r2 + m2 - r1 % m2) % m2;
  return r1 + m1 * mul_mod(diff, t.gamma12(), m2);
}

}  // namespace

std::vector<GatedCandidate> gate_pairs(const ResidueSet& R1, const ResidueSet& R2,
                                       const ResidueSet& R3, const ModTriple& triple,
                                       const std::array<ViewParams, 3>& hashes) {
  std::vector<char> present(triple.m3(), 0);
  for (const auto& [bin, mag] : R3.residues) present[bin % triple.m3()] = 1;
  std::vector<GatedCandidate> out;
  out.reserve(R1.residues.size() * R2.residues.size());
  for (const auto& [b1, m1] : R1.residues) {
    const u64 r1 = hashes[0].unhash(b1);
    for (const auto& [b2, m2] : R2.residues) {
      GatedCandidate c;
      c.r1 = r1;
      c.r2 = hashes[1].unhash(b2);
      c.f12 = crt12(c.r1, c.r2, triple);
      c.r3_hat = hashes[2].hash(c.f12 % triple.m3());
      c.passed = present[c.r3_hat] != 0;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<GatedCandidate> gate_pairs(const std::vector<u64>& R1, const std::vector<u64>& R2,
                                       const std::vector<u64>& R3, const ModTriple& triple) {
  auto wrap = [](const std::vector<u64>& r) {
    ResidueSet s;
    for (u64 x : r) s.residues.emplace_back(x, 0.0);
    s.capacity = r.size();
    return s;
  };
  return gate_pairs(wrap(R1), wrap(R2), wrap(R3), triple, identity_hashes(triple));
}

GateStats gate_survivor_stats(u64 N, u64 k, double alpha, const ModTriple& triple, u64 trials,
                              u64 seed) {
  GateStats st;
  st.trials = trials;
  const auto ak = static_cast<u64>(std::ceil(alpha * static_cast<double>(k)));
  std::array<u64, 3> cap{};
  for (int i = 0; i < 3; ++i) cap[i] = std::min(ak, triple.m(i));
  st.prediction = static_cast<double>(cap[0]) * static_cast<double>(cap[1]) *
                  static_cast<double>(cap[2]) / static_cast<double>(triple.m3());
  if (trials == 0 || k == 0) return st;

  // two views only identify frequencies below m1*m2
  const u64 range = static_cast<u64>(std::min<u128>(N, static_cast<u128>(triple.m1()) * triple.m2()));
  double sum = 0.0, sum_sq = 0.0, sum_true = 0.0;
  std::vector<char> occupied;
  for (u64 trial = 0; trial < trials; ++trial) {
    KeyedStream stream(seed, "gate-trial-" + std::to_string(trial));
    std::unordered_set<u64> support;
    while (support.size() < k) support.insert(stream.uniform(range));

    std::array<std::vector<u64>, 3> sets;
    for (int i = 0; i < 3; ++i) {
      const u64 m = triple.m(i);
      occupied.assign(m, 0);
      for (u64 f : support) {
        if (!occupied[f % m]) {
          occupied[f % m] = 1;
          sets[i].push_back(f % m);
        }
      }
      while (sets[i].size() < cap[i]) {
        const u64 r = stream.uniform(m);
        if (occupied[r]) continue;
        occupied[r] = 1;
        sets[i].push_back(r);
      }
    }

    std::vector<char> in3(triple.m3(), 0);
    for (u64 r : sets[2]) in3[r] = 1;
    std::unordered_set<u64> true_pairs;
    for (u64 f : support) true_pairs.insert((f % triple.m1()) * triple.m2() + f % triple.m2());
    u64 passed_false = 0, passed_true = 0;
    for (u64 r1 : sets[0]) {
      for (u64 r2 : sets[1]) {
        const u64 f12 = crt12(r1, r2, triple);
        if (!in3[f12 % triple.m3()]) continue;
        if (true_pairs.count(r1 * triple.m2() + r2)) {
          ++passed_true;
        } else {
          ++passed_false;
        }
      }
    }
    // planted frequencies sharing both residues count as one pair
    if (passed_true == true_pairs.size()) ++st.trials_all_true;
    sum += static_cast<double>(passed_false);
    sum_sq += static_cast<double>(passed_false) * static_cast<double>(passed_false);
    sum_true += static_cast<double>(passed_true);
  }
  const double n = static_cast<double>(trials);
  st.mean_false_survivors = sum / n;
  const double var = trials > 1 ? (sum_sq - sum * sum / n) / (n - 1) : 0.0;
  st.stderr_false_survivors = std::sqrt(std::max(var, 0.0) / n);
  st.mean_true_survivors = sum_true / n;
  return st;
}

}  // namespace ksfft
