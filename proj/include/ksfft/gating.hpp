#pragma once

// Keyed 2-of-3 agreement: reconstruct each (r1, r2) pair by CRT and keep it
// only if the predicted third residue is occupied.

#include <array>
#include <cstdint>
#include <vector>

#include "ksfft/numtheory.hpp"
#include "ksfft/planner.hpp"
#include "ksfft/views.hpp"

namespace ksfft {

struct GatedCandidate {
  u64 r1 = 0;  // frequency residues mod m1, m2 (un-hashed bins)
  u64 r2 = 0;
  u64 f12 = 0;
  u64 r3_hat = 0;  // predicted bin in view 3, tested against R3
  bool passed = false;

  friend bool operator==(const GatedCandidate&, const GatedCandidate&) = default;
};

/// Identity hashing for all three views of a triple.
std::array<ViewParams, 3> identity_hashes(const ModTriple& triple);

/// |R1|*|R2| candidates in R1-major order. Bins are un-hashed to frequency
/// residues before the CRT and the prediction re-hashed for view 3.
std::vector<GatedCandidate> gate_pairs(const ResidueSet& R1, const ResidueSet& R2,
                                       const ResidueSet& R3, const ModTriple& triple,
                                       const std::array<ViewParams, 3>& hashes);

/// Convenience overload taking bare residue lists with identity hashing.
std::vector<GatedCandidate> gate_pairs(const std::vector<u64>& R1, const std::vector<u64>& R2,
                                       const std::vector<u64>& R3, const ModTriple& triple);

struct GateStats {
  double mean_false_survivors = 0.0;
  double stderr_false_survivors = 0.0;
  double mean_true_survivors = 0.0;
  std::uint64_t trials_all_true = 0;  // trials in which every planted pair passed
  std::uint64_t trials = 0;
  double prediction = 0.0;  // (alpha k)^3 / m3 with alpha k capped at each modulus
};

/// Random k-supports on [0, min(N, m1*m2)) with residue sets of size alpha*k per view:
/// the true residues plus fillers uniform over unoccupied bins.
GateStats gate_survivor_stats(u64 N, u64 k, double alpha, const ModTriple& triple, u64 trials,
                              u64 seed);

}  // namespace ksfft
