#include "ksfft/views.hpp"

#include <algorithm>
#include <cmath>

#include "ksfft/error.hpp"
#include "ksfft/peeling.hpp"

namespace ksfft {

cplx ViewSpectrum::phase(u64 f, int s) const {
  return unit_phase(mul_mod(f % grid, params.shift(s, grid), grid), grid);
}

double ViewSpectrum::max_magnitude() const {
  double mx = 0.0;
  for (const auto& sh : shifts) {
    for (const cplx& v : sh) mx = std::max(mx, std::abs(v));
  }
  return mx;
}

ViewSignal::ViewSignal(const SignalSource& parent, ViewParams params, u64 grid, int shift)
    : parent_(parent), params_(params), grid_(grid) {
  if (params_.m == 0 || grid_ % params_.m != 0) {
    throw Error(ErrorCode::StrideMismatch,
                "modulus " + std::to_string(params_.m) + " does not divide grid " + std::to_string(grid_));
  }
  if (gcd(params_.sigma, grid_) != 1 || gcd(params_.tau, grid_) != 1) {
    throw Error(ErrorCode::InvalidArgument, "dilation or shift step not invertible modulo the grid");
  }
  stride_ = grid_ / params_.m;
  offset_ = params_.shift(shift, grid_);
}

cplx ViewSignal::sample(std::uint64_t j) const {
  j %= params_.m;
  const u64 n = (mul_mod(params_.sigma, j * stride_, grid_) + offset_) % grid_;
  cplx v = parent_.sample(n);
  if (params_.b != 0) v *= unit_phase(mul_mod(params_.b, j, params_.m), params_.m);
  return v;
}

ViewSpectrum build_view(const SignalSource& source, const ViewParams& params, u64 grid,
                        const Config& cfg, const ViewBuildOptions& opts, OpCounter* counter) {
  if (source.grid_length() != grid) {
    throw Error(ErrorCode::StrideMismatch, "source grid differs from plan grid");
  }
  ViewSpectrum view;
  view.params = params;
  view.grid = grid;
  const u64 m = params.m;
  const double inv_m = 1.0 / static_cast<double>(m);
  bool any_sparse = false;
  for (int s = 0; s < params.shift_count; ++s) {
    ViewSignal signal(source, params, grid, s);
    ComplexBuffer bins(m, cplx{});
    if (opts.mode == ViewMode::Recursive) {
      const auto rec = recursive_spectrum(signal, opts.k, opts.depth, cfg, opts.max_depth,
                                          opts.seed ^ (static_cast<u64>(s) << 56), counter);
      any_sparse = any_sparse || !rec.dense_terminal;
      bins = rec.bins;
    } else {
      ComplexBuffer y(m);
      for (u64 j = 0; j < m; ++j) y[j] = signal.sample(j);
      bins = dft_forward(y, counter);
      for (cplx& v : bins) v *= inv_m;
    }
    view.shifts.push_back(std::move(bins));
  }
  view.representation = any_sparse ? Representation::Sparse : Representation::Dense;
  double mx = 0.0;
  for (const cplx& v : view.shifts[0]) mx = std::max(mx, std::abs(v));
  view.noise_floor = cfg.noise_floor_rel * mx;
  return view;
}

ViewSpectrum predict_view(const SparseSpectrum& spectrum, const ViewParams& params, u64 grid) {
  ViewSpectrum view;
  view.params = params;
  view.grid = grid;
  view.shifts.assign(params.shift_count, ComplexBuffer(params.m, cplx{}));
  for (const auto& e : spectrum.entries()) {
    const u64 r = params.hash(e.f);
    for (int s = 0; s < params.shift_count; ++s) view.shifts[s][r] += e.coeff * view.phase(e.f, s);
  }
  return view;
}

bool ResidueSet::contains(u64 r) const {
  return std::any_of(residues.begin(), residues.end(), [r](const auto& p) { return p.first == r; });
}

std::unordered_set<u64> ResidueSet::membership() const {
  std::unordered_set<u64> out;
  for (const auto& [r, mag] : residues) out.insert(r);
  return out;
}

ResidueSet extract_residues(const ViewSpectrum& view, std::size_t alpha_k, double noise_floor) {
  if (alpha_k < 1) throw Error(ErrorCode::InvalidArgument, "alpha_k must be >= 1");
  ResidueSet set;
  set.capacity = alpha_k;
  const auto& bins = view.shifts.at(0);
  for (u64 r = 0; r < bins.size(); ++r) {
    const double mag = std::abs(bins[r]);
    if (mag > noise_floor) set.residues.emplace_back(r, mag);
  }
  std::sort(set.residues.begin(), set.residues.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (set.residues.size() > alpha_k) set.residues.resize(alpha_k);
  return set;
}

double view_energy(const SignalSource& source, const ViewParams& params, u64 grid) {
  ViewSignal signal(source, params, grid, 0);
  double e = 0.0;
  for (u64 j = 0; j < params.m; ++j) e += std::norm(signal.sample(j));
  return e;
}

}  // namespace ksfft
