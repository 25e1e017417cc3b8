#include "ksfft/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "ksfft/error.hpp"

namespace ksfft {

using ojson = nlohmann::ordered_json;

namespace {

ojson view_to_json(const ViewParams& v) {
  return ojson{{"m", v.m}, {"sigma", v.sigma}, {"b", v.b}, {"tau", v.tau},
               {"shift_count", v.shift_count}};
}

ViewParams view_from_json(const ojson& j) {
  ViewParams v;
  v.m = j.at("m").get<u64>();
  v.sigma = j.at("sigma").get<u64>();
  v.b = j.at("b").get<u64>();
  v.tau = j.at("tau").get<u64>();
  v.shift_count = j.at("shift_count").get<int>();
  if (v.m < 2 || v.b >= v.m || v.shift_count < 2 || v.shift_count > 3) {
    throw Error(ErrorCode::ParseError, "invalid view parameters");
  }
  return v;
}

std::string pair_name(const GateRecord& g) {
  return "(" + std::to_string(g.r1) + ", " + std::to_string(g.r2) + ")";
}

}  // namespace

Certificate build_certificate(const CertificateInputs& in) {
  Certificate c;
  c.path = in.path;
  c.escalations = in.escalations;
  c.declared_n = in.declared_n;
  if (in.verification) c.verification = *in.verification;
  if (in.plan) {
    const ModuliPlan& p = *in.plan;
    c.has_plan = true;
    c.M = p.M;
    c.N = p.N;
    c.k = p.k;
    c.seed = p.rng_seed;
    c.moduli = {p.triple.m1(), p.triple.m2(), p.triple.m3()};
    c.id_views = p.id_views;
    c.verify_views = p.verify_views;
  }
  if (in.residue_sets) c.residue_sets = *in.residue_sets;
  if (!in.spectrum) return c;

  double max_amp = 0.0;
  for (const auto& e : in.spectrum->entries()) {
    c.amplitudes.push_back({e.f, e.coeff});
    max_amp = std::max(max_amp, std::abs(e.coeff));
  }
  c.tau = in.tau_rel * max_amp;
  if (!c.has_plan) return c;

  const ModTriple& t = in.plan->triple;
  std::unordered_set<u64> in3;
  for (const auto& [bin, mag] : c.residue_sets[2].residues) in3.insert(bin);
  for (const auto& e : in.spectrum->entries()) {
    const u64 r1 = e.f % t.m1(), r2 = e.f % t.m2(), r3 = e.f % t.m3();
    const Garner3 g = t.garner3(r1, r2, r3);
    c.crt.push_back({e.f, r1, r2, r3, g.u2, g.u3});
    if (in.record_gates) {
      GateRecord gr;
      gr.f = e.f;
      gr.r1 = r1;
      gr.r2 = r2;
      gr.f12 = garner2(r1, r2, t.m1(), t.m2());
      gr.r3_hat = c.id_views[2].hash(gr.f12 % t.m3());
      gr.passed = in3.count(gr.r3_hat) > 0;
      c.gated_pairs.push_back(gr);
    }
  }
  return c;
}

std::string serialize_certificate(const Certificate& c) {
  ojson j;
  j["version"] = c.version;
  j["path"] = c.path;
  j["escalations"] = c.escalations;
  if (c.has_plan) {
    ojson plan;
    plan["M"] = c.M;
    plan["N"] = c.N;
    plan["k"] = c.k;
    plan["seed"] = c.seed;
    plan["moduli"] = c.moduli;
    plan["id_views"] = ojson::array();
    for (const auto& v : c.id_views) plan["id_views"].push_back(view_to_json(v));
    plan["verify_views"] = ojson::array();
    for (const auto& v : c.verify_views) plan["verify_views"].push_back(view_to_json(v));
    j["plan"] = plan;
  } else {
    j["plan"] = nullptr;
  }
  j["residue_sets"] = ojson::array();
  for (const auto& rs : c.residue_sets) {
    ojson arr = ojson::array();
    for (const auto& [bin, mag] : rs.residues) arr.push_back({{"bin", bin}, {"magnitude", mag}});
    j["residue_sets"].push_back(ojson{{"capacity", rs.capacity}, {"residues", arr}});
  }
  j["gated_pairs"] = ojson::array();
  for (const auto& g : c.gated_pairs) {
    j["gated_pairs"].push_back({{"f", g.f}, {"r1", g.r1}, {"r2", g.r2}, {"f12", g.f12},
                                {"r3_hat", g.r3_hat}, {"passed", g.passed}});
  }
  j["crt"] = ojson::array();
  for (const auto& r : c.crt) {
    j["crt"].push_back({{"f", r.f}, {"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}, {"u2", r.u2},
                        {"u3", r.u3}});
  }
  j["amplitudes"] = ojson::array();
  for (const auto& a : c.amplitudes) {
    j["amplitudes"].push_back(
        {{"f", a.f}, {"re", a.a.real()}, {"im", a.a.imag()}, {"abs", std::abs(a.a)}});
  }
  j["tau"] = c.tau;
  ojson ver;
  ver["overall"] = c.verification.overall;
  ver["unverified"] = c.verification.unverified;
  ver["epsilon"] = c.verification.epsilon;
  ver["views"] = ojson::array();
  for (const auto& v : c.verification.views) {
    ver["views"].push_back({{"view_modulus", v.view_modulus},
                            {"parseval_gap", v.parseval_gap},
                            {"residual_energy", v.residual_energy},
                            {"epsilon", v.epsilon},
                            {"passed", v.passed}});
  }
  j["verification"] = ver;
  if (c.declared_n) j["declared_n"] = *c.declared_n;
  return j.dump(2) + "\n";
}

Certificate parse_certificate(const std::string& text) {
  try {
    const ojson j = ojson::parse(text);
    Certificate c;
    c.version = j.at("version").get<int>();
    c.path = j.at("path").get<std::string>();
    c.escalations = j.at("escalations").get<std::vector<std::string>>();
    const ojson& plan = j.at("plan");
    if (!plan.is_null()) {
      c.has_plan = true;
      c.M = plan.at("M").get<u64>();
      c.N = plan.at("N").get<u64>();
      c.k = plan.at("k").get<u64>();
      c.seed = plan.at("seed").get<u64>();
      c.moduli = plan.at("moduli").get<std::array<u64, 3>>();
      const auto& iv = plan.at("id_views");
      if (iv.size() != 3) throw Error(ErrorCode::ParseError, "expected three id_views");
      for (int i = 0; i < 3; ++i) c.id_views[i] = view_from_json(iv[i]);
      for (const auto& v : plan.at("verify_views")) c.verify_views.push_back(view_from_json(v));
    }
    const auto& rs = j.at("residue_sets");
    if (rs.size() != 3) throw Error(ErrorCode::ParseError, "expected three residue_sets");
    for (int i = 0; i < 3; ++i) {
      c.residue_sets[i].capacity = rs[i].at("capacity").get<std::size_t>();
      for (const auto& r : rs[i].at("residues")) {
        c.residue_sets[i].residues.emplace_back(r.at("bin").get<u64>(),
                                                r.at("magnitude").get<double>());
      }
    }
    for (const auto& g : j.at("gated_pairs")) {
      c.gated_pairs.push_back({g.at("f").get<u64>(), g.at("r1").get<u64>(), g.at("r2").get<u64>(),
                               g.at("f12").get<u64>(), g.at("r3_hat").get<u64>(),
                               g.at("passed").get<bool>()});
    }
    for (const auto& r : j.at("crt")) {
      c.crt.push_back({r.at("f").get<u64>(), r.at("r1").get<u64>(), r.at("r2").get<u64>(),
                       r.at("r3").get<u64>(), r.at("u2").get<u64>(), r.at("u3").get<u64>()});
    }
    for (const auto& a : j.at("amplitudes")) {
      c.amplitudes.push_back(
          {a.at("f").get<u64>(), cplx{a.at("re").get<double>(), a.at("im").get<double>()}});
    }
    c.tau = j.at("tau").get<double>();
    const ojson& ver = j.at("verification");
    c.verification.overall = ver.at("overall").get<bool>();
    c.verification.unverified = ver.at("unverified").get<bool>();
    c.verification.epsilon = ver.at("epsilon").get<double>();
    for (const auto& v : ver.at("views")) {
      ViewVerdict vv;
      vv.view_modulus = v.at("view_modulus").get<u64>();
      vv.parseval_gap = v.at("parseval_gap").get<double>();
      vv.residual_energy = v.at("residual_energy").get<double>();
      vv.epsilon = v.at("epsilon").get<double>();
      vv.passed = v.at("passed").get<bool>();
      c.verification.views.push_back(vv);
    }
    if (j.contains("declared_n")) c.declared_n = j.at("declared_n").get<u64>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void save_certificate(const Certificate& cert, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << serialize_certificate(cert);
}

Certificate load_certificate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

std::vector<std::string> verify_certificate(const Certificate& c, const SignalSource& source,
                                            double eps_rel) {
  std::vector<std::string> out;
  if (c.k < c.amplitudes.size() && c.has_plan) {
    out.push_back("entry count " + std::to_string(c.amplitudes.size()) + " exceeds k = " +
                  std::to_string(c.k));
  }
  for (const auto& a : c.amplitudes) {
    if (!(std::abs(a.a) >= c.tau)) {
      out.push_back("amplitude at f = " + std::to_string(a.f) + " below tau");
    }
  }
  if (!c.has_plan) return out;

  std::optional<ModTriple> triple;
  try {
    triple.emplace(c.moduli[0], c.moduli[1], c.moduli[2]);
  } catch (const Error& e) {
    out.push_back(std::string("moduli: ") + e.what());
    return out;
  }
  if (triple->M() != c.M) out.push_back("moduli product differs from M");

  std::unordered_set<u64> in3;
  for (const auto& [bin, mag] : c.residue_sets[2].residues) in3.insert(bin);
  for (const auto& g : c.gated_pairs) {
    std::vector<std::string> issues;
    if (g.r1 >= triple->m1() || g.r2 >= triple->m2()) {
      issues.push_back("residue out of range");
    } else {
      const u64 f12 = garner2(g.r1, g.r2, triple->m1(), triple->m2());
      const u64 r3 = c.id_views[2].hash(f12 % triple->m3());
      const bool passed = in3.count(r3) > 0;
      if (f12 != g.f12) issues.push_back("f12 " + std::to_string(g.f12) + " != " + std::to_string(f12));
      if (r3 != g.r3_hat) {
        issues.push_back("r3_hat " + std::to_string(g.r3_hat) + " != " + std::to_string(r3));
      }
      if (passed != g.passed) issues.push_back("recorded verdict differs");
      if (!passed) issues.push_back("predicted bin not in R3");
      if (g.f % triple->m1() != g.r1 || g.f % triple->m2() != g.r2) {
        issues.push_back("residues do not match f = " + std::to_string(g.f));
      }
    }
    if (!issues.empty()) {
      std::string msg = "gated pair " + pair_name(g) + ":";
      for (const auto& s : issues) msg += " " + s + ";";
      out.push_back(msg);
    }
  }

  std::unordered_set<u64> crt_f;
  for (const auto& r : c.crt) {
    std::vector<std::string> issues;
    if (r.r1 >= triple->m1() || r.r2 >= triple->m2() || r.r3 >= triple->m3()) {
      issues.push_back("residue out of range");
    } else {
      const Garner3 g = triple->garner3(r.r1, r.r2, r.r3);
      if (g.u2 != r.u2 || g.u3 != r.u3) issues.push_back("mixed-radix digits differ");
      if (g.f != r.f) issues.push_back("reconstruction gives " + std::to_string(g.f));
    }
    if (r.f >= c.M) issues.push_back("f outside [0, M)");
    if (c.declared_n && r.f >= *c.declared_n) issues.push_back("f outside declared [0, N)");
    if (!issues.empty()) {
      std::string msg = "crt record f = " + std::to_string(r.f) + ":";
      for (const auto& s : issues) msg += " " + s + ";";
      out.push_back(msg);
    }
    crt_f.insert(r.f);
  }
  for (const auto& a : c.amplitudes) {
    if (!crt_f.count(a.f)) out.push_back("f = " + std::to_string(a.f) + " has no crt record");
  }

  // fresh amplitudes from one dense view
  if (source.grid_length() != c.M) {
    out.push_back("signal grid length differs from certificate M");
    return out;
  }
  const ViewParams vp = c.verify_views.empty() ? c.id_views[0] : c.verify_views[0];
  ViewSpectrum view;
  try {
    Config dense;
    dense.view_mode = ViewMode::Dense;
    view = build_view(source, vp, c.M, dense, ViewBuildOptions{});
  } catch (const Error& e) {
    out.push_back(std::string("check view: ") + e.what());
    return out;
  }
  std::vector<SpectrumEntry> entries;
  for (const auto& a : c.amplitudes) {
    if (a.f < c.M && a.a != cplx{}) entries.push_back({a.f, a.a});
  }
  std::sort(entries.begin(), entries.end(),
            [](const SpectrumEntry& x, const SpectrumEntry& y) { return x.f < y.f; });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const SpectrumEntry& x, const SpectrumEntry& y) { return x.f == y.f; }),
                entries.end());
  const SparseSpectrum cand(c.M, std::move(entries));
  const ViewSpectrum pred = predict_view(cand, vp, c.M);
  double e_time = 0.0;
  for (const cplx& v : view.shifts[0]) e_time += std::norm(v);
  const double eps = eps_rel * std::max(e_time, 1.0);
  for (const auto& a : c.amplitudes) {
    const u64 r = vp.hash(a.f);
    if (std::norm(view.shifts[0][r] - pred.shifts[0][r]) > eps) {
      out.push_back("amplitude at f = " + std::to_string(a.f) + " disagrees with fresh view bin " +
                    std::to_string(r));
    }
  }
  if (c.path == "fast") {
    double resid = 0.0;
    for (int s = 0; s < view.shift_count(); ++s) {
      for (u64 r = 0; r < view.m(); ++r) resid += std::norm(view.shifts[s][r] - pred.shifts[s][r]);
    }
    if (resid > eps) out.push_back("fresh view residual " + std::to_string(resid) + " exceeds tolerance");
  }
  return out;
}

}  // namespace ksfft
