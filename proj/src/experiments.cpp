#include "ksfft/experiments.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "ksfft/peeling.hpp"
#include "ksfft/planner.hpp"
#include "ksfft/verification.hpp"
#include "ksfft/views.hpp"

namespace ksfft {

SparseSpectrum random_spectrum(u64 grid, u64 k, KeyedStream& rng, u64 range) {
  if (range == 0 || range > grid) range = grid;
  std::set<u64> support;
  while (support.size() < k) support.insert(rng.uniform(range));
  std::vector<SpectrumEntry> entries;
  constexpr u64 kPhaseSteps = u64{1} << 20;
  for (u64 f : support) {
    const double mag = 0.5 + 1.5 * static_cast<double>(rng.uniform(kPhaseSteps)) /
                                 static_cast<double>(kPhaseSteps);
    entries.push_back({f, mag * unit_phase(rng.uniform(kPhaseSteps), kPhaseSteps)});
  }
  return SparseSpectrum(grid, std::move(entries));
}

namespace {

MeanStat summarize(double sum, double sum_sq, u64 n) {
  MeanStat s;
  if (n == 0) return s;
  const double dn = static_cast<double>(n);
  s.mean = sum / dn;
  const double var = n > 1 ? (sum_sq - sum * sum / dn) / (dn - 1) : 0.0;
  s.stderr_ = std::sqrt(std::max(var, 0.0) / dn);
  return s;
}

std::vector<ViewSpectrum> predicted_views(const SparseSpectrum& s, const ModTriple& t, u64 seed,
                                          const std::string& domain, const Config& cfg) {
  std::vector<ViewSpectrum> views;
  for (int i = 0; i < 3; ++i) {
    KeyedStream stream(seed, domain + std::to_string(i));
    const ViewParams p = draw_view(stream, t.m(i), t.M(), cfg.shift_count, cfg.identity_hash);
    ViewSpectrum v = predict_view(s, p, t.M());
    v.noise_floor = cfg.noise_floor_rel * v.max_magnitude();
    views.push_back(std::move(v));
  }
  return views;
}

}  // namespace

SingletonStats singleton_experiment(const ModTriple& triple, u64 k, u64 trials, u64 seed,
                                    const Config& cfg) {
  SingletonStats st;
  st.trials = trials;
  const u64 mmin = std::min({triple.m1(), triple.m2(), triple.m3()});
  st.lambda = static_cast<double>(k) / static_cast<double>(mmin);
  if (trials == 0 || k == 0) return st;
  double pv = 0, pv2 = 0, av = 0, av2 = 0, rounds = 0;
  u64 complete = 0, within = 0;
  const int cap = round_cap(k, cfg);
  for (u64 trial = 0; trial < trials; ++trial) {
    KeyedStream rng(seed, "singleton-trial-" + std::to_string(trial));
    const SparseSpectrum s = random_spectrum(triple.M(), k, rng);
    PeelState state(predicted_views(s, triple, rng.next(), "view-", cfg), triple.M());
    const PeelOutcome out = run_peeling(state, k, cfg);
    double per = 0;
    for (std::size_t c : out.first_round_singletons) per += static_cast<double>(c);
    per /= 3.0 * static_cast<double>(k);
    const double across = static_cast<double>(out.first_round_distinct) / static_cast<double>(k);
    pv += per;
    pv2 += per * per;
    av += across;
    av2 += across * across;
    rounds += out.rounds;
    if (out.status == PeelStatus::Complete) ++complete;
    if (out.status == PeelStatus::Complete && out.rounds <= cap) ++within;
  }
  const double n = static_cast<double>(trials);
  st.per_view = summarize(pv, pv2, trials);
  st.across_views = summarize(av, av2, trials);
  st.complete_fraction = static_cast<double>(complete) / n;
  st.within_cap_fraction = static_cast<double>(within) / n;
  st.mean_rounds = rounds / n;
  return st;
}

VerifyMissStats verify_miss_experiment(const ModTriple& triple, u64 N, u64 k, int t, u64 trials,
                                       u64 seed, const Config& cfg_in) {
  VerifyMissStats st;
  st.trials = trials;
  Config cfg = cfg_in;
  cfg.moduli = {triple.m1(), triple.m2(), triple.m3()};
  cfg.verify_mode = ViewMode::Dense;
  cfg.threads = 1;
  st.bound = 2.0 * static_cast<double>(k) / static_cast<double>(triple.m1());
  if (trials == 0 || k == 0) return st;
  for (u64 trial = 0; trial < trials; ++trial) {
    KeyedStream rng(seed, "verify-trial-" + std::to_string(trial));
    const ModuliPlan plan = make_plan(N, k, t, rng.next(), cfg);
    const SparseSpectrum truth = random_spectrum(plan.M, k, rng);
    const SparseSource source(truth);

    // move one frequency, keep its coefficient
    std::vector<SpectrumEntry> moved = truth.entries();
    const std::size_t victim = rng.uniform(moved.size());
    u64 f_new;
    do {
      f_new = rng.uniform(plan.M);
    } while (truth.find(f_new).has_value());
    moved[victim].f = f_new;
    const SparseSpectrum corrupted(plan.M, std::move(moved));
    if (verify(source, plan, corrupted, cfg).overall) ++st.slips;

    std::vector<SpectrumEntry> dropped = truth.entries();
    dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(rng.uniform(dropped.size())));
    if (!verify(source, plan, SparseSpectrum(plan.M, std::move(dropped)), cfg).overall) {
      ++st.missing_rejected;
    }
  }
  const double n = static_cast<double>(trials);
  st.rate = static_cast<double>(st.slips) / n;
  st.stderr_ = std::sqrt(st.rate * (1.0 - st.rate) / n);
  return st;
}

RehashStats rehash_experiment(const ModTriple& triple, u64 k, u64 trials, u64 seed,
                              const Config& cfg) {
  RehashStats st;
  st.trials = trials;
  for (u64 trial = 0; trial < trials; ++trial) {
    KeyedStream rng(seed, "rehash-trial-" + std::to_string(trial));
    const SparseSpectrum s = random_spectrum(triple.M(), k, rng);
    PeelState state(predicted_views(s, triple, rng.next(), "view-", cfg), triple.M());
    const PeelOutcome out = run_peeling(state, k, cfg);
    if (out.status == PeelStatus::Complete) continue;
    ++st.stuck;
    std::map<u64, cplx> left;
    for (const auto& e : s.entries()) left[e.f] += e.coeff;
    for (const auto& [f, c] : state.recovered) left[f] -= c;
    std::vector<SpectrumEntry> rest;
    for (const auto& [f, c] : left) {
      if (std::abs(c) > cfg.noise_floor_rel) rest.push_back({f, c});
    }
    const SparseSpectrum residual(triple.M(), std::move(rest));
    PeelState again(predicted_views(residual, triple, rng.next(), "rehash/view-", cfg), triple.M());
    if (run_peeling(again, k, cfg).status == PeelStatus::Complete) ++st.rescued;
  }
  return st;
}

}  // namespace ksfft
