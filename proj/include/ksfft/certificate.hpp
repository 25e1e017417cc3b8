#pragma once

// Self-contained audit record of a run and its independent re-check.
//
// JSON layout (field order is fixed):
//   version, path, escalations, plan{M, N, k, seed, moduli, id_views, verify_views},
//   residue_sets[3][{bin, magnitude}], gated_pairs[{f, r1, r2, f12, r3_hat, passed}],
//   crt[{f, r1, r2, r3, u2, u3}], amplitudes[{f, re, im, abs}], tau,
//   verification{overall, unverified, epsilon, views[...]}, declared_n (optional)

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ksfft/planner.hpp"
#include "ksfft/signal.hpp"
#include "ksfft/verification.hpp"
#include "ksfft/views.hpp"

namespace ksfft {

struct GateRecord {
  u64 f = 0;
  u64 r1 = 0;
  u64 r2 = 0;
  u64 f12 = 0;
  u64 r3_hat = 0;
  bool passed = false;
};

struct CrtRecord {
  u64 f = 0;
  u64 r1 = 0;
  u64 r2 = 0;
  u64 r3 = 0;
  u64 u2 = 0;
  u64 u3 = 0;
};

struct AmplitudeRecord {
  u64 f = 0;
  cplx a{};
};

struct Certificate {
  int version = 1;
  std::string path;
  std::vector<std::string> escalations;
  bool has_plan = false;
  u64 M = 0;
  u64 N = 0;
  u64 k = 0;
  u64 seed = 0;
  std::array<u64, 3> moduli{};
  std::array<ViewParams, 3> id_views{};
  std::vector<ViewParams> verify_views;
  std::array<ResidueSet, 3> residue_sets;
  std::vector<GateRecord> gated_pairs;
  std::vector<CrtRecord> crt;
  std::vector<AmplitudeRecord> amplitudes;
  double tau = 0.0;
  VerificationReport verification;
  std::optional<u64> declared_n;
};

struct CertificateInputs {
  std::string path;
  std::vector<std::string> escalations;
  const ModuliPlan* plan = nullptr;  // original (pre-rehash) plan, if any
  const std::array<ResidueSet, 3>* residue_sets = nullptr;
  const SparseSpectrum* spectrum = nullptr;
  const VerificationReport* verification = nullptr;
  bool record_gates = true;
  double tau_rel = 1e-6;
  std::optional<u64> declared_n;
};

Certificate build_certificate(const CertificateInputs& in);

std::string serialize_certificate(const Certificate& cert);
/// Throws ParseError on malformed input.
Certificate parse_certificate(const std::string& text);

void save_certificate(const Certificate& cert, const std::string& path);
Certificate load_certificate(const std::string& path);

/// Re-derives every recorded check from the certificate and fresh signal
/// samples. Empty result means valid.
std::vector<std::string> verify_certificate(const Certificate& cert, const SignalSource& source,
                                            double eps_rel = 1e-6);

}  // namespace ksfft
