#pragma once

// plan -> views -> peel (+rehash) -> top-k -> verify -> accept, or the dense
// fallback on any failure.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ksfft/certificate.hpp"
#include "ksfft/config.hpp"
#include "ksfft/peeling.hpp"
#include "ksfft/planner.hpp"
#include "ksfft/signal.hpp"
#include "ksfft/verification.hpp"

namespace ksfft {

enum class RecoveryPath { FastPath, Fallback };
const char* to_string(RecoveryPath p) noexcept;

struct OpCounts {
  u64 identification = 0;  // identification view transforms
  u64 peeling = 0;
  u64 verification = 0;
  u64 fallback = 0;

  u64 total() const { return identification + peeling + verification + fallback; }
};

struct RecoveryResult {
  SparseSpectrum spectrum;
  RecoveryPath path = RecoveryPath::FastPath;
  std::vector<std::string> escalations;
  Certificate certificate;
  OpCounts ops;
  std::optional<ModuliPlan> plan;
  PeelStatus peel_status = PeelStatus::Complete;
  int peel_rounds = 0;
  int rehash_count = 0;
  std::size_t candidates = 0;
  VerificationReport verification;
};

struct PipelineHooks {
  /// Applied to the top-k candidate just before verification.
  std::function<void(SparseSpectrum&)> corrupt_candidate;
};

/// Grid length a signal of nominal length N must be padded to for (k, cfg),
/// or N itself when the planner refuses the instance.
u64 planned_grid(u64 N, u64 k, const Config& cfg, u64 seed = 0);

int default_max_depth(u64 N, const Config& cfg);

/// Source grid must equal the planned grid for source.original_length().
/// Throws StrideMismatch otherwise; every other failure routes to Fallback.
RecoveryResult sparse_fft(const SignalSource& source, u64 k, const Config& cfg, u64 seed,
                          const PipelineHooks& hooks = {});

/// Top-k bins of the full (1/M)-normalized DFT; ties by ascending frequency.
/// Throws OracleCapExceeded past cfg.dense_cap.
SparseSpectrum dense_fallback(const SignalSource& source, u64 k, const Config& cfg = {},
                              OpCounter* counter = nullptr);

std::string result_to_json(const RecoveryResult& r);

}  // namespace ksfft
