#pragma once

// Seeded Monte Carlo drivers shared by the CLI and the acceptance suite.

#include <cstdint>

#include "ksfft/config.hpp"
#include "ksfft/numtheory.hpp"
#include "ksfft/rng.hpp"
#include "ksfft/signal.hpp"

namespace ksfft {

/// k distinct frequencies uniform on [0, range) (range 0: the grid) with
/// magnitudes uniform in [0.5, 2] and uniform phases.
SparseSpectrum random_spectrum(u64 grid, u64 k, KeyedStream& rng, u64 range = 0);

struct MeanStat {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SingletonStats {
  u64 trials = 0;
  double lambda = 0.0;             // k / min modulus
  MeanStat per_view;               // singleton bins per view / k, first round
  MeanStat across_views;           // distinct frequencies found / k, first round
  double complete_fraction = 0.0;  // peeling finished
  double within_cap_fraction = 0.0;
  double mean_rounds = 0.0;
};

/// First-round singleton statistics on random k-sparse instances over the
/// triple's grid, with fresh random hashes per trial. View data come from
/// the alias-sum identity.
SingletonStats singleton_experiment(const ModTriple& triple, u64 k, u64 trials, u64 seed,
                                    const Config& cfg = {});

struct VerifyMissStats {
  u64 trials = 0;
  u64 slips = 0;             // corrupted candidates accepted
  u64 missing_rejected = 0;  // candidates with one tone dropped that were rejected
  double rate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;        // 2k / m_v
};

/// Parseval-neutral corruptions (one frequency moved, coefficient kept)
/// and dropped-tone candidates against t verification views.
VerifyMissStats verify_miss_experiment(const ModTriple& triple, u64 N, u64 k, int t, u64 trials,
                                       u64 seed, const Config& cfg = {});

struct RehashStats {
  u64 trials = 0;
  u64 stuck = 0;    // peeling did not complete on the first hash draw
  u64 rescued = 0;  // completed after one rehash
};

RehashStats rehash_experiment(const ModTriple& triple, u64 k, u64 trials, u64 seed,
                              const Config& cfg = {});

}  // namespace ksfft
