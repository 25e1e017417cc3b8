#include "ksfft/signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ksfft/error.hpp"
#include "ksfft/numtheory.hpp"

namespace ksfft {

SparseSpectrum::SparseSpectrum(std::uint64_t grid_length, std::vector<SpectrumEntry> entries)
    : grid_length_(grid_length), entries_(std::move(entries)) {
  if (grid_length_ < 1) throw Error(ErrorCode::InvalidArgument, "grid length must be >= 1");
  std::sort(entries_.begin(), entries_.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.f < b.f; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.f >= grid_length_) {
      throw Error(ErrorCode::OutOfRange, "frequency " + std::to_string(e.f) + " >= grid length " +
                                             std::to_string(grid_length_));
    }
    if (i > 0 && entries_[i - 1].f == e.f) {
      throw Error(ErrorCode::DuplicateFrequency, "frequency " + std::to_string(e.f));
    }
    if (!std::isfinite(e.coeff.real()) || !std::isfinite(e.coeff.imag())) {
      throw Error(ErrorCode::NonFinite, "coefficient at " + std::to_string(e.f));
    }
    if (e.coeff == cplx{}) {
      throw Error(ErrorCode::InvalidArgument, "zero coefficient at " + std::to_string(e.f));
    }
  }
}

double SparseSpectrum::energy() const {
  double e = 0.0;
  for (const auto& x : entries_) e += std::norm(x.coeff);
  return e;
}

std::optional<cplx> SparseSpectrum::find(std::uint64_t f) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), f,
                             [](const SpectrumEntry& e, std::uint64_t v) { return e.f < v; });
  if (it == entries_.end() || it->f != f) return std::nullopt;
  return it->coeff;
}

cplx SparseSource::sample(std::uint64_t n) const {
  const u64 M = spectrum_.grid_length();
  cplx acc{};
  for (const auto& e : spectrum_.entries()) acc += e.coeff * unit_phase(mul_mod(e.f, n % M, M), M);
  return acc;
}

DenseSource::DenseSource(ComplexBuffer samples, std::uint64_t padded_length)
    : samples_(std::move(samples)), padded_length_(padded_length) {
  if (padded_length_ < samples_.size() || padded_length_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "padded length below sample count");
  }
}

cplx DenseSource::sample(std::uint64_t n) const {
  n %= padded_length_;
  return n < samples_.size() ? samples_[n] : cplx{};
}

ResidualSource::ResidualSource(std::shared_ptr<const SignalSource> base, SparseSpectrum removed)
    : base_(std::move(base)), removed_(std::move(removed)) {
  if (removed_.spectrum().grid_length() != base_->grid_length()) {
    throw Error(ErrorCode::InvalidArgument, "residual spectrum grid mismatch");
  }
}

cplx ResidualSource::sample(std::uint64_t n) const { return base_->sample(n) - removed_.sample(n); }

std::shared_ptr<const SignalSource> synthesize(SparseSpectrum spectrum,
                                               std::uint64_t nominal_length) {
  return std::make_shared<SparseSource>(std::move(spectrum), nominal_length);
}

std::shared_ptr<const SignalSource> from_dense(ComplexBuffer samples, std::uint64_t padded_length) {
  return std::make_shared<DenseSource>(std::move(samples), padded_length);
}

ComplexBuffer materialize(const SignalSource& source, std::uint64_t cap) {
  const u64 M = source.grid_length();
  if (M > cap) {
    throw Error(ErrorCode::OracleCapExceeded,
                "grid length " + std::to_string(M) + " exceeds dense budget " + std::to_string(cap));
  }
  ComplexBuffer out(M);
  for (u64 n = 0; n < M; ++n) out[n] = source.sample(n);
  return out;
}

std::string spectrum_to_json(const SparseSpectrum& s) {
  nlohmann::ordered_json j;
  j["grid_length"] = s.grid_length();
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : s.entries()) {
    j["entries"].push_back({{"f", e.f}, {"re", e.coeff.real()}, {"im", e.coeff.imag()}});
  }
  return j.dump(2);
}

SparseSpectrum spectrum_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    const auto grid = j.at("grid_length").get<std::uint64_t>();
    std::vector<SpectrumEntry> entries;
    for (const auto& e : j.at("entries")) {
      entries.push_back({e.at("f").get<std::uint64_t>(),
                         cplx{e.at("re").get<double>(), e.at("im").get<double>()}});
    }
    return SparseSpectrum(grid, std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << data;
}

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace

void save_spectrum(const std::filesystem::path& path, const SparseSpectrum& s) {
  write_file(path, spectrum_to_json(s) + "\n");
}

SparseSpectrum load_spectrum(const std::filesystem::path& path) {
  return spectrum_from_json(read_file(path));
}

void save_dense_binary(const std::filesystem::path& path, const ComplexBuffer& samples) {
  std::string out;
  out.reserve(8 + 16 * samples.size());
  put_u64_le(out, samples.size());
  for (const cplx& v : samples) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(v.real()));
    put_u64_le(out, std::bit_cast<std::uint64_t>(v.imag()));
  }
  write_file(path, out);
}

ComplexBuffer load_dense_binary(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() < 8) throw Error(ErrorCode::ParseError, "missing length header");
  const std::uint64_t n = get_u64_le(data, 0);
  if (data.size() != 8 + 16 * n) {
    throw Error(ErrorCode::ParseError, "payload size does not match length header");
  }
  ComplexBuffer out(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out[i] = {std::bit_cast<double>(get_u64_le(data, 8 + 16 * i)),
              std::bit_cast<double>(get_u64_le(data, 16 + 16 * i))};
  }
  return out;
}

ComplexBuffer load_dense_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::pair<std::uint64_t, cplx>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("index", 0) == 0) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw Error(ErrorCode::ParseError, "bad CSV row: " + line);
    }
    try {
      rows.emplace_back(std::stoull(a), cplx{std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad CSV row: " + line);
    }
  }
  std::uint64_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.first + 1);
  ComplexBuffer out(n, cplx{});
  for (const auto& [i, v] : rows) out[i] = v;
  return out;
}

ComplexBuffer load_dense(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return load_dense_csv(path);
  return load_dense_binary(path);
}

}  // namespace ksfft
