#include "ksfft/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "ksfft/error.hpp"
#include "ksfft/rng.hpp"

namespace ksfft {

PeelState::PeelState(std::vector<ViewSpectrum> v, u64 grid_length)
    : views(std::move(v)), grid(grid_length) {
  refresh();
}

bool PeelState::refresh() {
  remaining_energy = 0.0;
  bool clear = true;
  for (const auto& view : views) {
    for (const auto& sh : view.shifts) {
      for (const cplx& y : sh) remaining_energy += std::norm(y);
    }
    for (const cplx& y : view.shifts[0]) {
      if (std::abs(y) > view.noise_floor) clear = false;
    }
  }
  return clear;
}

SparseSpectrum PeelState::recovered_spectrum() const {
  std::vector<SpectrumEntry> entries;
  entries.reserve(recovered.size());
  for (const auto& [f, c] : recovered) entries.push_back({f, c});
  return SparseSpectrum(grid, std::move(entries));
}

std::optional<SingletonReading> check_bin(const ViewSpectrum& view, int view_index, u64 r,
                                          double tol) {
  const int S = view.shift_count();
  if (S < 2) return std::nullopt;
  const cplx y0 = view.shifts[0][r];
  const double mag0 = std::abs(y0);
  if (!(mag0 > view.noise_floor) || mag0 == 0.0) return std::nullopt;

  double err = 0.0;
  for (int s = 1; s < S; ++s) {
    err = std::max(err, std::abs(std::abs(view.shifts[s][r]) - mag0) / mag0);
  }
  if (err > tol) return std::nullopt;

  const u64 G = view.grid;
  const cplx ratio = view.shifts[1][r] / y0;
  double raw = std::arg(ratio) / (2.0 * std::numbers::pi) * static_cast<double>(G);
  if (raw < 0) raw += static_cast<double>(G);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) > kIntegralitySlack) return std::nullopt;
  const u64 step = static_cast<u64>(nearest) % G;
  const u64 f = mul_mod(step, mod_inverse(view.params.tau % G, G), G);
  if (view.params.hash(f) != r) return std::nullopt;

  if (S >= 3) {
    const cplx ratio2 = view.shifts[2][r] / view.shifts[1][r];
    const double d = std::abs(ratio2 - ratio);
    if (d > tol) return std::nullopt;
    err = std::max(err, d);
  }
  return SingletonReading{view_index, r, f, y0, err};
}

std::vector<SingletonReading> detect_singletons(const PeelState& state, double tol) {
  std::vector<SingletonReading> out;
  for (std::size_t v = 0; v < state.views.size(); ++v) {
    const auto& view = state.views[v];
    for (u64 r = 0; r < view.m(); ++r) {
      if (auto reading = check_bin(view, static_cast<int>(v), r, tol)) out.push_back(*reading);
    }
  }
  return out;
}

void peel(PeelState& state, const SingletonReading& reading) {
  const double floor = state.views.at(reading.view_index).noise_floor;
  auto it = state.recovered.find(reading.f_hat);
  if (it != state.recovered.end() && !(std::abs(reading.coeff) > floor)) {
    throw Error(ErrorCode::DuplicateConflict,
                "frequency " + std::to_string(reading.f_hat) + " re-detected below the floor");
  }
  for (auto& view : state.views) {
    const u64 r = view.params.hash(reading.f_hat);
    for (int s = 0; s < view.shift_count(); ++s) {
      view.shifts[s][r] -= reading.coeff * view.phase(reading.f_hat, s);
    }
  }
  if (it == state.recovered.end()) {
    state.recovered.emplace(reading.f_hat, reading.coeff);
  } else {
    it->second += reading.coeff;
    if (std::abs(it->second) <= floor) state.recovered.erase(it);
  }
}

const char* to_string(PeelStatus s) noexcept {
  switch (s) {
    case PeelStatus::Complete: return "complete";
    case PeelStatus::TwoCore: return "two-core";
    case PeelStatus::Stagnated: return "stagnated";
  }
  return "?";
}

int round_cap(u64 k, const Config& cfg) {
  return static_cast<int>(std::ceil(cfg.round_factor * std::log2(static_cast<double>(k) + 2.0)));
}

PeelOutcome run_peeling(PeelState& state, u64 k, const Config& cfg, OpCounter* counter) {
  PeelOutcome out;
  out.first_round_singletons.assign(state.views.size(), 0);
  const int cap = round_cap(k, cfg);
  bool done = state.refresh();
  out.status = PeelStatus::Stagnated;
  while (!done && state.round < cap) {
    const auto readings = detect_singletons(state, cfg.singleton_tol);
    if (counter) {
      for (const auto& v : state.views) counter->add(v.m() * static_cast<u64>(v.shift_count()));
    }
    if (state.round == 0) {
      std::set<u64> distinct;
      for (const auto& rd : readings) {
        ++out.first_round_singletons[rd.view_index];
        distinct.insert(rd.f_hat);
      }
      out.first_round_distinct = distinct.size();
    }
    bool progress = false;
    for (const auto& rd : readings) {
      // an earlier peel this round may already have cleared the bin
      auto fresh = check_bin(state.views[rd.view_index], rd.view_index, rd.residue,
                             cfg.singleton_tol);
      if (!fresh) continue;
      peel(state, *fresh);
      if (counter) {
        for (const auto& v : state.views) counter->add(static_cast<u64>(v.shift_count()));
      }
      progress = true;
    }
    ++state.round;
    done = state.refresh();
    if (!progress) {
      out.status = PeelStatus::TwoCore;
      break;
    }
  }
  if (done) out.status = PeelStatus::Complete;
  out.rounds = state.round;
  out.recovered = state.recovered_spectrum();
  return out;
}

SparseSpectrum RecursiveResult::sparse(double floor) const {
  std::vector<SpectrumEntry> entries;
  for (u64 f = 0; f < bins.size(); ++f) {
    if (std::abs(bins[f]) > floor && bins[f] != cplx{}) entries.push_back({f, bins[f]});
  }
  return SparseSpectrum(bins.size(), std::move(entries));
}

std::vector<u64> child_moduli(u64 length) {
  if (length < 6) return {};
  const auto factors = factorize(length);
  if (factors.size() < 2) return {};
  std::vector<u64> powers;
  for (const auto& [p, e] : factors) {
    u64 q = 1;
    for (int i = 0; i < e; ++i) q *= p;
    powers.push_back(q);
  }
  std::sort(powers.rbegin(), powers.rend());
  std::vector<u64> groups(std::min<std::size_t>(3, powers.size()), 1);
  for (u64 q : powers) *std::min_element(groups.begin(), groups.end()) *= q;
  std::sort(groups.begin(), groups.end());
  return groups;
}

namespace {

RecursiveResult dense_spectrum(const SignalSource& signal, int depth, OpCounter* counter) {
  const u64 L = signal.grid_length();
  ComplexBuffer y(L);
  for (u64 j = 0; j < L; ++j) y[j] = signal.sample(j);
  RecursiveResult res;
  res.bins = dft_forward(y, counter);
  const double inv = 1.0 / static_cast<double>(L);
  for (cplx& v : res.bins) v *= inv;
  res.dense_terminal = true;
  res.depth_reached = depth;
  return res;
}

}  // namespace

RecursiveResult recursive_spectrum(const SignalSource& signal, u64 k, int depth, const Config& cfg,
                                   int max_depth, u64 seed, OpCounter* counter) {
  const u64 L = signal.grid_length();
  if (depth >= max_depth) return dense_spectrum(signal, depth, counter);
  const auto children = child_moduli(L);
  if (children.empty()) return dense_spectrum(signal, depth, counter);
  if (static_cast<double>(k) / static_cast<double>(children.front()) > cfg.lambda_threshold) {
    return dense_spectrum(signal, depth, counter);
  }

  std::vector<ViewSpectrum> views;
  for (std::size_t i = 0; i < children.size(); ++i) {
    KeyedStream stream(seed, "child-view-" + std::to_string(i));
    const ViewParams p = draw_view(stream, children[i], L, cfg.shift_count, false);
    ViewBuildOptions opts{ViewMode::Recursive, k, depth + 1, max_depth, splitmix64(seed + i + 1)};
    views.push_back(build_view(signal, p, L, cfg, opts, counter));
  }
  PeelState state(std::move(views), L);
  const PeelOutcome outcome = run_peeling(state, k, cfg, counter);
  if (outcome.status != PeelStatus::Complete || outcome.recovered.size() > k) {
    return dense_spectrum(signal, depth, counter);
  }

  // energy identity against raw samples guards the sparse answer
  double e_time = 0.0;
  for (u64 j = 0; j < L; ++j) e_time += std::norm(signal.sample(j));
  if (counter) counter->add(L);
  e_time /= static_cast<double>(L);
  const double e_rec = outcome.recovered.energy();
  if (std::abs(e_time - e_rec) > cfg.verify_eps_rel * std::max(e_time, 1e-300)) {
    return dense_spectrum(signal, depth, counter);
  }

  RecursiveResult res;
  res.bins.assign(L, cplx{});
  for (const auto& e : outcome.recovered.entries()) res.bins[e.f] = e.coeff;
  res.dense_terminal = false;
  res.depth_reached = depth + 1;
  return res;
}

}  // namespace ksfft
