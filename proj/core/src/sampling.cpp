#include "nnmc/sampling.hpp"

#include "nnmc/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace nnmc {

SampleMultiset::SampleMultiset(Index rows, Index cols,
                               std::vector<std::pair<Index, Index>> pairs,
                               std::uint64_t seed)
    : rows_(rows), cols_(cols), pairs_(std::move(pairs)), seed_(seed) {
  if (rows_ < 1 || cols_ < 1) {
    throw std::invalid_argument("SampleMultiset: ambient dimensions must be positive");
  }
  if (pairs_.empty()) {
    throw std::invalid_argument("SampleMultiset: sample must be non-empty");
  }
  for (const auto& [i, j] : pairs_) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
      throw std::invalid_argument("SampleMultiset: index pair out of bounds");
    }
  }
  auto sorted = pairs_;
  std::sort(sorted.begin(), sorted.end());
  cells_.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size();) {
    std::size_t e = k;
    while (e < sorted.size() && sorted[e] == sorted[k]) ++e;
    cells_.push_back(Cell{sorted[k].first, sorted[k].second,
                          static_cast<int>(e - k)});
    max_multiplicity_ = std::max(max_multiplicity_, cells_.back().count);
    k = e;
  }
}

SampleMultiset SampleMultiset::uniform(Index rows, Index cols,
                                       std::size_t count, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_uniform: dimensions must be positive");
  }
  if (count < 1) {
    throw std::invalid_argument("sample_uniform: count must be positive");
  }
  Rng rng(seed);
  const std::uint64_t n_cells =
      static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t cell = rng.next_below(n_cells);
    pairs.emplace_back(static_cast<Index>(cell / static_cast<std::uint64_t>(cols)),
                       static_cast<Index>(cell % static_cast<std::uint64_t>(cols)));
  }
  return SampleMultiset(rows, cols, std::move(pairs), seed);
}

namespace {

void require_dims(const SampleMultiset& omega, const Matrix& z,
                  const char* what) {
  if (z.rows() != omega.rows() || z.cols() != omega.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

Matrix apply_romega(const SampleMultiset& omega, const Matrix& z) {
  require_dims(omega, z, "apply_romega");
  Matrix out = Matrix::Zero(z.rows(), z.cols());
  for (const auto& cell : omega.cells()) {
    out(cell.row, cell.col) = cell.count * z(cell.row, cell.col);
  }
  return out;
}

double romega_inner(const SampleMultiset& omega, const Matrix& z,
                    const Matrix& w) {
  require_dims(omega, z, "romega_inner");
  require_dims(omega, w, "romega_inner");
  double sum = 0.0;
  for (const auto& cell : omega.cells()) {
    sum += cell.count * z(cell.row, cell.col) * w(cell.row, cell.col);
  }
  return sum;
}

ObservationSet::ObservationSet(SampleMultiset sample,
                               std::vector<double> values)
    : sample_(std::move(sample)), values_(std::move(values)) {
  if (values_.size() != sample_.size()) {
    throw std::invalid_argument("ObservationSet: values/pairs length mismatch");
  }
  std::unordered_map<std::uint64_t, double> seen;
  seen.reserve(values_.size());
  const auto& pairs = sample_.pairs();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("ObservationSet: non-finite value");
    }
    const std::uint64_t key =
        static_cast<std::uint64_t>(pairs[k].first) *
            static_cast<std::uint64_t>(sample_.cols()) +
        static_cast<std::uint64_t>(pairs[k].second);
    const auto [it, inserted] = seen.emplace(key, values_[k]);
    if (!inserted && it->second != values_[k]) {
      throw std::invalid_argument(
          "ObservationSet: duplicated pair carries differing values");
    }
  }
  cell_values_.reserve(sample_.cells().size());
  for (const auto& cell : sample_.cells()) {
    const std::uint64_t key =
        static_cast<std::uint64_t>(cell.row) *
            static_cast<std::uint64_t>(sample_.cols()) +
        static_cast<std::uint64_t>(cell.col);
    cell_values_.push_back(seen.at(key));
  }
}

ObservationSet observe(const Matrix& a, const SampleMultiset& omega) {
  require_dims(omega, a, "observe");
  require_finite(a, "observe");
  std::vector<double> values;
  values.reserve(omega.size());
  for (const auto& [i, j] : omega.pairs()) values.push_back(a(i, j));
  return ObservationSet(omega, std::move(values));
}

ObservationSet read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open observation file: " + path);
  long long m = 0, n = 0, count = 0;
  if (!(in >> m >> n >> count)) {
    throw std::invalid_argument(path + ": bad observation header");
  }
  if (m < 1 || n < 1 || count < 1) {
    throw std::invalid_argument(path + ": non-positive header fields");
  }
  std::vector<std::pair<Index, Index>> pairs;
  std::vector<double> values;
  pairs.reserve(static_cast<std::size_t>(count));
  values.reserve(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k) {
    long long i = 0, j = 0;
    std::string token;
    if (!(in >> i >> j >> token)) {
      throw std::invalid_argument(path + ": truncated observation file");
    }
    double value = 0.0;
    const auto res =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw std::invalid_argument(path + ": bad value '" + token + "'");
    }
    // file is 1-based
    pairs.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1));
    values.push_back(value);
  }
  return ObservationSet(
      SampleMultiset(static_cast<Index>(m), static_cast<Index>(n),
                     std::move(pairs), 0),
      std::move(values));
}

void write_observations(const ObservationSet& obs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write observation file: " + path);
  const auto& s = obs.sample();
  out << s.rows() << ' ' << s.cols() << ' ' << s.size() << '\n';
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << (s.pairs()[k].first + 1) << ' ' << (s.pairs()[k].second + 1) << ' '
        << format_double(obs.values()[k]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nnmc
