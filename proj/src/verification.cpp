#include "ksfft/verification.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "ksfft/peeling.hpp"

namespace ksfft {

double verify_epsilon(double e_time, const Config& cfg) {
  return cfg.verify_eps_rel * std::max(e_time, 1.0);
}

CheckResult parseval_check(const SignalSource& source, const ViewParams& params, u64 grid,
                           const SparseSpectrum& candidate, double eps) {
  const double e_time = view_energy(source, params, grid) / static_cast<double>(params.m);
  ComplexBuffer bins(params.m, cplx{});
  for (const auto& e : candidate.entries()) bins[params.hash(e.f)] += e.coeff;
  double e_cand = 0.0;
  for (const cplx& v : bins) e_cand += std::norm(v);
  CheckResult res;
  res.value = std::abs(e_time - e_cand);
  res.passed = res.value <= eps;
  return res;
}

CheckResult residual_check(const ViewSpectrum& view, const SparseSpectrum& candidate, double eps) {
  const ViewSpectrum predicted = predict_view(candidate, view.params, view.grid);
  double e = 0.0;
  for (int s = 0; s < view.shift_count(); ++s) {
    for (u64 r = 0; r < view.m(); ++r) e += std::norm(view.shifts[s][r] - predicted.shifts[s][r]);
  }
  CheckResult res;
  res.value = e;
  res.passed = e <= eps;
  return res;
}

namespace {

ViewVerdict verify_one(const SignalSource& source, const ModuliPlan& plan, std::size_t v,
                       const SparseSpectrum& candidate, const Config& cfg, OpCounter* counter) {
  const ViewParams& p = plan.verify_views[v];
  ViewVerdict out;
  out.view_modulus = p.m;
  const double e_time = view_energy(source, p, plan.M);
  if (counter) counter->add(p.m);
  out.epsilon = verify_epsilon(e_time / static_cast<double>(p.m), cfg);
  const int depth_budget = cfg.max_depth > 0
                               ? cfg.max_depth
                               : static_cast<int>(std::ceil(std::log2(std::log2(
                                     static_cast<double>(std::max<u64>(plan.N, 4))))));
  ViewBuildOptions opts{cfg.verify_mode, plan.k, 1, depth_budget,
                        splitmix64(plan.rng_seed ^ (0x5eedULL + v))};
  const ViewSpectrum view = build_view(source, p, plan.M, cfg, opts, counter);
  const CheckResult c1 = parseval_check(source, p, plan.M, candidate, out.epsilon);
  const CheckResult c2 = residual_check(view, candidate, out.epsilon);
  if (counter) counter->add(candidate.size() * (1 + static_cast<u64>(p.shift_count)) +
                            p.m * static_cast<u64>(p.shift_count));
  out.parseval_gap = c1.value;
  out.residual_energy = c2.value;
  out.passed = c1.passed && c2.passed;
  return out;
}

}  // namespace

VerificationReport verify(const SignalSource& source, const ModuliPlan& plan,
                          const SparseSpectrum& candidate, const Config& cfg,
                          OpCounter* counter) {
  VerificationReport rep;
  const std::size_t t = plan.verify_views.size();
  if (t == 0) {
    rep.unverified = true;
    return rep;
  }
  rep.views.resize(t);
  const int threads = resolve_threads(cfg);
  if (threads > 1 && t > 1) {
    std::vector<OpCounter> counters(t);
    std::vector<std::future<ViewVerdict>> jobs;
    for (std::size_t v = 0; v < t; ++v) {
      jobs.push_back(std::async(std::launch::async, verify_one, std::cref(source),
                                std::cref(plan), v, std::cref(candidate), std::cref(cfg),
                                &counters[v]));
    }
    for (std::size_t v = 0; v < t; ++v) {
      rep.views[v] = jobs[v].get();
      if (counter) counter->add(counters[v].ops);
    }
  } else {
    for (std::size_t v = 0; v < t; ++v) {
      rep.views[v] = verify_one(source, plan, v, candidate, cfg, counter);
    }
  }
  for (const auto& vv : rep.views) {
    rep.overall = rep.overall && vv.passed;
    rep.epsilon = std::max(rep.epsilon, vv.epsilon);
  }
  return rep;
}

}  // namespace ksfft
