#include "ksfft/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "json.hpp"
#include "ksfft/error.hpp"
#include "ksfft/rng.hpp"

namespace ksfft {

const char* to_string(RecoveryPath p) noexcept {
  return p == RecoveryPath::FastPath ? "fast" : "fallback";
}

u64 planned_grid(u64 N, u64 k, const Config& cfg, u64 seed) {
  try {
    return make_plan(N, k, 0, seed, cfg).M;
  } catch (const Error&) {
    return N;
  }
}

int default_max_depth(u64 N, const Config& cfg) {
  if (cfg.max_depth > 0) return cfg.max_depth;
  const double n = static_cast<double>(std::max<u64>(N, 4));
  return std::max(1, static_cast<int>(std::ceil(std::log2(std::log2(n)))));
}

SparseSpectrum dense_fallback(const SignalSource& source, u64 k, const Config& cfg,
                              OpCounter* counter) {
  const u64 M = source.grid_length();
  const ComplexBuffer x = materialize(source, cfg.dense_cap);
  ComplexBuffer X = dft_forward(x, counter);
  const double inv = 1.0 / static_cast<double>(M);
  double mx = 0.0;
  for (cplx& v : X) {
    v *= inv;
    mx = std::max(mx, std::abs(v));
  }
  const double floor = cfg.noise_floor_rel * mx;
  std::vector<SpectrumEntry> occupied;
  for (u64 f = 0; f < M; ++f) {
    if (std::abs(X[f]) > floor && X[f] != cplx{}) occupied.push_back({f, X[f]});
  }
  std::stable_sort(occupied.begin(), occupied.end(), [](const auto& a, const auto& b) {
    return std::abs(a.coeff) > std::abs(b.coeff);
  });
  if (occupied.size() > k) occupied.resize(k);
  return SparseSpectrum(M, std::move(occupied));
}

namespace {

std::vector<ViewSpectrum> build_id_views(const SignalSource& source, const ModuliPlan& plan,
                                         const Config& cfg, u64 seed, OpCounter* counter) {
  const int depth_budget = default_max_depth(plan.N, cfg);
  auto one = [&](int i, OpCounter* c) {
    ViewBuildOptions opts{cfg.view_mode, plan.k, 1, depth_budget,
                          splitmix64(seed ^ (0x1dULL + static_cast<u64>(i)))};
    return build_view(source, plan.id_views[i], plan.M, cfg, opts, c);
  };
  std::vector<ViewSpectrum> views(3);
  if (resolve_threads(cfg) > 1) {
    std::array<OpCounter, 3> counters{};
    std::vector<std::future<ViewSpectrum>> jobs;
    for (int i = 0; i < 3; ++i) jobs.push_back(std::async(std::launch::async, one, i, &counters[i]));
    for (int i = 0; i < 3; ++i) {
      views[i] = jobs[i].get();
      if (counter) counter->add(counters[i].ops);
    }
  } else {
    for (int i = 0; i < 3; ++i) views[i] = one(i, counter);
  }
  return views;
}

void merge_into(std::map<u64, cplx>& acc, const SparseSpectrum& s) {
  for (const auto& e : s.entries()) acc[e.f] += e.coeff;
}

SparseSpectrum top_k(const std::map<u64, cplx>& acc, u64 grid, u64 k) {
  std::vector<SpectrumEntry> entries;
  for (const auto& [f, c] : acc) {
    if (c != cplx{}) entries.push_back({f, c});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::abs(a.coeff) > std::abs(b.coeff);
  });
  if (entries.size() > k) entries.resize(k);
  return SparseSpectrum(grid, std::move(entries));
}

}  // namespace

RecoveryResult sparse_fft(const SignalSource& source, u64 k, const Config& cfg, u64 seed,
                          const PipelineHooks& hooks) {
  RecoveryResult res;
  const u64 N = source.original_length();
  const u64 G = source.grid_length();
  std::optional<std::array<ResidueSet, 3>> residue_sets;

  auto finish = [&](RecoveryPath path) {
    res.path = path;
    CertificateInputs in;
    in.path = to_string(path);
    in.escalations = res.escalations;
    in.plan = res.plan ? &*res.plan : nullptr;
    in.residue_sets = residue_sets ? &*residue_sets : nullptr;
    in.spectrum = &res.spectrum;
    in.verification = &res.verification;
    in.record_gates = cfg.gate_certificate && residue_sets.has_value();
    in.tau_rel = cfg.tau_rel;
    if (N != G) in.declared_n = N;
    res.certificate = build_certificate(in);
    return res;
  };
  auto fallback = [&](const std::string& reason) {
    res.escalations.push_back(reason);
    res.escalations.push_back("dense-fallback");
    OpCounter c;
    res.spectrum = dense_fallback(source, k, cfg, &c);
    res.ops.fallback += c.ops;
    return finish(RecoveryPath::Fallback);
  };

  try {
    res.plan = make_plan(N, k, cfg.t, seed, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DenseRegime && e.code() != ErrorCode::SearchExhausted &&
        e.code() != ErrorCode::Overflow) {
      throw;
    }
    return fallback(e.code() == ErrorCode::DenseRegime ? "dense-regime" : "no-plan");
  }
  ModuliPlan& plan = *res.plan;
  if (plan.M != G) {
    throw Error(ErrorCode::StrideMismatch, "source grid " + std::to_string(G) +
                                               " differs from planned grid " +
                                               std::to_string(plan.M));
  }
  if (cfg.force_fallback) return fallback("forced");
  if (plan.load_factor() > cfg.peel_load_max) return fallback("load-factor");

  OpCounter id_ops, peel_ops, ver_ops;
  std::vector<ViewSpectrum> views = build_id_views(source, plan, cfg, seed, &id_ops);
  const auto alpha_k = static_cast<std::size_t>(
      std::max(1.0, std::ceil(cfg.alpha * static_cast<double>(k))));
  residue_sets.emplace();
  for (int i = 0; i < 3; ++i) {
    (*residue_sets)[i] = extract_residues(views[i], alpha_k, views[i].noise_floor);
  }

  PeelState state(std::move(views), plan.M);
  PeelOutcome outcome = run_peeling(state, k, cfg, &peel_ops);
  std::map<u64, cplx> acc;
  merge_into(acc, outcome.recovered);
  res.peel_rounds = outcome.rounds;

  std::shared_ptr<const SignalSource> base(&source, [](const SignalSource*) {});
  ModuliPlan current = plan;
  while (outcome.status != PeelStatus::Complete && res.rehash_count < cfg.max_rehash) {
    ++res.rehash_count;
    res.escalations.push_back(std::string("rehash-after-") + to_string(outcome.status));
    current = rehash(current, splitmix64(seed + static_cast<u64>(res.rehash_count)));
    std::vector<SpectrumEntry> removed;
    for (const auto& [f, c] : acc) {
      if (c != cplx{}) removed.push_back({f, c});
    }
    const ResidualSource residual(base, SparseSpectrum(plan.M, std::move(removed)));
    PeelState again(build_id_views(residual, current, cfg, seed + 0x100 * res.rehash_count,
                                   &id_ops),
                    plan.M);
    outcome = run_peeling(again, k, cfg, &peel_ops);
    merge_into(acc, outcome.recovered);
    res.peel_rounds += outcome.rounds;
  }
  res.peel_status = outcome.status;
  res.ops.identification = id_ops.ops;
  res.ops.peeling = peel_ops.ops;
  if (outcome.status != PeelStatus::Complete) {
    return fallback(std::string("peeling-") + to_string(outcome.status));
  }

  res.candidates = static_cast<std::size_t>(
      std::count_if(acc.begin(), acc.end(), [](const auto& p) { return p.second != cplx{}; }));
  if (res.candidates > 2 * k) {
    res.escalations.push_back("extra-verification-views");
    extend_verification(plan, cfg.max_extra_verify_views, cfg);
  }
  SparseSpectrum candidate = top_k(acc, plan.M, k);
  if (hooks.corrupt_candidate) hooks.corrupt_candidate(candidate);

  res.verification = verify(source, plan, candidate, cfg, &ver_ops);
  res.ops.verification = ver_ops.ops;
  if (!res.verification.overall) return fallback("verification-failed");
  res.spectrum = std::move(candidate);
  return finish(RecoveryPath::FastPath);
}

std::string result_to_json(const RecoveryResult& r) {
  nlohmann::ordered_json j;
  j["path"] = to_string(r.path);
  j["escalations"] = r.escalations;
  j["spectrum"] = nlohmann::ordered_json::parse(spectrum_to_json(r.spectrum));
  j["peel_status"] = to_string(r.peel_status);
  j["peel_rounds"] = r.peel_rounds;
  j["rehash_count"] = r.rehash_count;
  j["ops"] = {{"identification", r.ops.identification},
              {"peeling", r.ops.peeling},
              {"verification", r.ops.verification},
              {"fallback", r.ops.fallback},
              {"total", r.ops.total()}};
  j["verification_overall"] = r.verification.overall;
  return j.dump(2) + "\n";
}

}  // namespace ksfft
