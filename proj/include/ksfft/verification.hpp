#pragma once

// Energy and bin-wise residual checks of a candidate spectrum against
// freshly built, independently hashed views.

#include <vector>

#include "ksfft/config.hpp"
#include "ksfft/planner.hpp"
#include "ksfft/signal.hpp"
#include "ksfft/views.hpp"

namespace ksfft {

struct CheckResult {
  double value = 0.0;  // gap or residual energy
  bool passed = false;
};

/// Tolerance for a view whose raw time energy is e_time.
double verify_epsilon(double e_time, const Config& cfg);

/// Compares E_time/m from raw samples with the candidate's energy as seen
/// by this view, sum_r |Yhat[r]|^2, which equals sum |A|^2 when the
/// candidate has no collisions here.
CheckResult parseval_check(const SignalSource& source, const ViewParams& params, u64 grid,
                           const SparseSpectrum& candidate, double eps);

/// sum over shifts and bins of |Y - Yhat|^2.
CheckResult residual_check(const ViewSpectrum& view, const SparseSpectrum& candidate, double eps);

struct ViewVerdict {
  u64 view_modulus = 0;
  double parseval_gap = 0.0;
  double residual_energy = 0.0;
  double epsilon = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<ViewVerdict> views;
  bool overall = true;
  bool unverified = false;  // no views were run
  double epsilon = 0.0;     // largest per-view tolerance
};

VerificationReport verify(const SignalSource& source, const ModuliPlan& plan,
                          const SparseSpectrum& candidate, const Config& cfg,
                          OpCounter* counter = nullptr);

}  // namespace ksfft
