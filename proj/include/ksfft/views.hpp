#pragma once

// Decimated, dilated, shifted observations of a signal on its grid.
//
// For view parameters (m, sigma, b, tau) on a grid of length G with stride
// d = G/m, shift s reads y_s[j] = x((sigma*j*d + s*tau) mod G) * e^{2 pi i b j/m}
// and stores (1/m) * DFT(y_s). Bin r then holds
//   sum_{f : (a*f + b) mod m = r} A_f * e^{2 pi i f s tau / G},  a = sigma mod m.

#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ksfft/config.hpp"
#include "ksfft/dft.hpp"
#include "ksfft/planner.hpp"
#include "ksfft/signal.hpp"

namespace ksfft {

enum class Representation { Dense, Sparse };

struct ViewSpectrum {
  ViewParams params;
  u64 grid = 0;
  Representation representation = Representation::Dense;
  std::vector<ComplexBuffer> shifts;  // [shift][bin]
  double noise_floor = 0.0;

  u64 m() const { return params.m; }
  int shift_count() const { return static_cast<int>(shifts.size()); }
  /// Phase a tone at f picks up in shift s.
  cplx phase(u64 f, int s) const;
  double max_magnitude() const;
};

/// Length-m view signal for one shift, exposed as a source on grid m.
class ViewSignal final : public SignalSource {
 public:
  ViewSignal(const SignalSource& parent, ViewParams params, u64 grid, int shift);
  std::uint64_t grid_length() const override { return params_.m; }
  cplx sample(std::uint64_t j) const override;

 private:
  const SignalSource& parent_;
  ViewParams params_;
  u64 grid_;
  u64 stride_;
  u64 offset_;
};

struct ViewBuildOptions {
  ViewMode mode = ViewMode::Dense;
  u64 k = 0;
  int depth = 1;       // depth of the view's own recursion node
  int max_depth = 1;
  u64 seed = 0;
};

/// Throws StrideMismatch if m does not divide the grid and
/// InvalidArgument if sigma or tau is not invertible modulo the grid.
ViewSpectrum build_view(const SignalSource& source, const ViewParams& params, u64 grid,
                        const Config& cfg = {}, const ViewBuildOptions& opts = {},
                        OpCounter* counter = nullptr);

/// Direct alias-sum evaluation of the view a spectrum would produce.
ViewSpectrum predict_view(const SparseSpectrum& spectrum, const ViewParams& params, u64 grid);

struct ResidueSet {
  std::vector<std::pair<u64, double>> residues;  // (bin, magnitude), descending
  std::size_t capacity = 0;

  bool contains(u64 r) const;
  std::unordered_set<u64> membership() const;
};

/// Top alpha_k bins by shift-0 magnitude above noise_floor; ties by bin.
ResidueSet extract_residues(const ViewSpectrum& view, std::size_t alpha_k, double noise_floor);

/// sum_j |y_0[j]|^2 from raw samples.
double view_energy(const SignalSource& source, const ViewParams& params, u64 grid);

}  // namespace ksfft
