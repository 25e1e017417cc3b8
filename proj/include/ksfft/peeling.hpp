#pragma once

// Singleton detection and successive cancellation across hashed views,
// plus the recursive view-spectrum builder that reuses them.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ksfft/config.hpp"
#include "ksfft/dft.hpp"
#include "ksfft/signal.hpp"
#include "ksfft/views.hpp"

namespace ksfft {

struct SingletonReading {
  int view_index = 0;
  u64 residue = 0;
  u64 f_hat = 0;
  cplx coeff{};
  double shift_ratio_error = 0.0;
};

struct PeelState {
  std::vector<ViewSpectrum> views;
  u64 grid = 0;
  std::map<u64, cplx> recovered;
  int round = 0;
  double remaining_energy = 0.0;

  PeelState() = default;
  PeelState(std::vector<ViewSpectrum> v, u64 grid_length);

  /// Recomputes remaining_energy; true when every bin sits at or below its
  /// view's noise floor.
  bool refresh();
  SparseSpectrum recovered_spectrum() const;
};

/// Phase-integrality slack on the rounded frequency, in grid units.
inline constexpr double kIntegralitySlack = 0.1;

/// Tests one bin; empty when any singleton condition fails.
std::optional<SingletonReading> check_bin(const ViewSpectrum& view, int view_index, u64 r,
                                          double tol);

std::vector<SingletonReading> detect_singletons(const PeelState& state, double tol);

/// Subtracts the reading from every view. Throws DuplicateConflict when the
/// frequency is already recovered and the new coefficient is below the floor.
void peel(PeelState& state, const SingletonReading& reading);

enum class PeelStatus { Complete, TwoCore, Stagnated };
const char* to_string(PeelStatus s) noexcept;

struct PeelOutcome {
  SparseSpectrum recovered;
  PeelStatus status = PeelStatus::Complete;
  int rounds = 0;
  // first-round statistics
  std::vector<std::size_t> first_round_singletons;  // singleton bins per view
  std::size_t first_round_distinct = 0;             // distinct frequencies found
};

int round_cap(u64 k, const Config& cfg);

/// Detect/peel until nothing is left, no progress is made, or the round cap.
/// Charges one op per scanned bin value and per bin update.
PeelOutcome run_peeling(PeelState& state, u64 k, const Config& cfg, OpCounter* counter = nullptr);

struct RecursiveResult {
  ComplexBuffer bins;         // (1/L) DFT of the view signal
  bool dense_terminal = true;
  int depth_reached = 0;

  SparseSpectrum sparse(double floor) const;
};

/// Child moduli for a length: up to three balanced, pairwise coprime groups
/// of its prime powers whose product is the length. Empty if fewer than two.
std::vector<u64> child_moduli(u64 length);

/// Spectrum of a length-L signal by recursive sparse recovery on child
/// views, with a dense transform wherever the recursion cannot proceed.
RecursiveResult recursive_spectrum(const SignalSource& signal, u64 k, int depth, const Config& cfg,
                                   int max_depth, u64 seed, OpCounter* counter = nullptr);

}  // namespace ksfft
