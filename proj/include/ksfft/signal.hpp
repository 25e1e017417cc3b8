#pragma once

// The exact k-sparse signal model on the padded grid and its file formats.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "ksfft/dft.hpp"

namespace ksfft {

struct SpectrumEntry {
  std::uint64_t f;
  cplx coeff;

  friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

/// Distinct ascending frequencies on [0, grid_length) with nonzero finite
/// coefficients.
class SparseSpectrum {
 public:
  SparseSpectrum() = default;
  /// Sorts the entries, then validates. Throws DuplicateFrequency,
  /// OutOfRange, NonFinite or InvalidArgument (zero coefficient).
  SparseSpectrum(std::uint64_t grid_length, std::vector<SpectrumEntry> entries);

  std::uint64_t grid_length() const { return grid_length_; }
  const std::vector<SpectrumEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double energy() const;
  std::optional<cplx> find(std::uint64_t f) const;

  friend bool operator==(const SparseSpectrum&, const SparseSpectrum&) = default;

 private:
  std::uint64_t grid_length_ = 1;
  std::vector<SpectrumEntry> entries_;
};

/// Read-only sample access on the grid [0, M). Implementations are safe for
/// concurrent readers and return bit-identical values for repeated indices.
class SignalSource {
 public:
  virtual ~SignalSource() = default;
  virtual std::uint64_t grid_length() const = 0;
  virtual std::uint64_t original_length() const { return grid_length(); }
  virtual cplx sample(std::uint64_t n) const = 0;
};

/// Lazy O(k)-per-sample synthesis of sum_i A_i e^{+2 pi i f_i n / M}.
class SparseSource final : public SignalSource {
 public:
  /// `nominal_length` is the length the grid was planned from (0: the grid).
  explicit SparseSource(SparseSpectrum spectrum, std::uint64_t nominal_length = 0)
      : spectrum_(std::move(spectrum)), nominal_length_(nominal_length) {}
  std::uint64_t grid_length() const override { return spectrum_.grid_length(); }
  std::uint64_t original_length() const override {
    return nominal_length_ ? nominal_length_ : spectrum_.grid_length();
  }
  cplx sample(std::uint64_t n) const override;
  const SparseSpectrum& spectrum() const { return spectrum_; }

 private:
  SparseSpectrum spectrum_;
  std::uint64_t nominal_length_ = 0;
};

/// A dense buffer zero-padded to the grid length.
class DenseSource final : public SignalSource {
 public:
  DenseSource(ComplexBuffer samples, std::uint64_t padded_length);
  std::uint64_t grid_length() const override { return padded_length_; }
  std::uint64_t original_length() const override { return samples_.size(); }
  cplx sample(std::uint64_t n) const override;

 private:
  ComplexBuffer samples_;
  std::uint64_t padded_length_;
};

/// base minus the synthesis of `removed`; used to re-observe what peeling
/// has not yet explained.
class ResidualSource final : public SignalSource {
 public:
  ResidualSource(std::shared_ptr<const SignalSource> base, SparseSpectrum removed);
  std::uint64_t grid_length() const override { return base_->grid_length(); }
  std::uint64_t original_length() const override { return base_->original_length(); }
  cplx sample(std::uint64_t n) const override;

 private:
  std::shared_ptr<const SignalSource> base_;
  SparseSource removed_;
};

std::shared_ptr<const SignalSource> synthesize(SparseSpectrum spectrum,
                                               std::uint64_t nominal_length = 0);
std::shared_ptr<const SignalSource> from_dense(ComplexBuffer samples, std::uint64_t padded_length);

/// Materializes every grid sample. Throws OracleCapExceeded past `cap`.
ComplexBuffer materialize(const SignalSource& source, std::uint64_t cap);

// Spectrum JSON: {"grid_length": M, "entries": [{"f":..,"re":..,"im":..}, ...]}
std::string spectrum_to_json(const SparseSpectrum& s);
SparseSpectrum spectrum_from_json(const std::string& text);
void save_spectrum(const std::filesystem::path& path, const SparseSpectrum& s);
SparseSpectrum load_spectrum(const std::filesystem::path& path);

// Dense signals: little-endian u64 length header followed by interleaved
// float64 (re, im) pairs, or CSV with columns index,re,im.
void save_dense_binary(const std::filesystem::path& path, const ComplexBuffer& samples);
ComplexBuffer load_dense_binary(const std::filesystem::path& path);
ComplexBuffer load_dense_csv(const std::filesystem::path& path);
/// Dispatches on extension: .csv -> CSV, anything else -> binary.
ComplexBuffer load_dense(const std::filesystem::path& path);

}  // namespace ksfft
