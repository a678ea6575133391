#pragma once

#include "nnmc/matrix.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nnmc {

/// Ordered multiset of (row, col) indices drawn with replacement from an
/// m-by-n grid. Indices are 0-based in memory; the observation file format
/// uses 1-based indices.
///
/// Alongside the ordered pair list the constructor builds a deduplicated
/// cell list with multiplicities, sorted by (row, col), which is what the
/// sampling operator and its inner products iterate over.
class SampleMultiset {
 public:
  struct Cell {
    Index row;
    Index col;
    int count;
  };

  SampleMultiset(Index rows, Index cols,
                 std::vector<std::pair<Index, Index>> pairs,
                 std::uint64_t seed = 0);

  /// `count` i.i.d. uniform draws over the grid, deterministic in `seed`.
  static SampleMultiset uniform(Index rows, Index cols, std::size_t count,
                                std::uint64_t seed);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return pairs_.size(); }
  std::uint64_t seed() const { return seed_; }

  const std::vector<std::pair<Index, Index>>& pairs() const { return pairs_; }

  /// Distinct cells with multiplicities, sorted by (row, col).
  const std::vector<Cell>& cells() const { return cells_; }

  /// Largest multiplicity over distinct cells. Equals the spectral norm of
  /// the sampling operator, which is diagonal in the entry basis.
  int max_multiplicity() const { return max_multiplicity_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<std::pair<Index, Index>> pairs_;
  std::vector<Cell> cells_;
  int max_multiplicity_ = 0;
  std::uint64_t seed_;
};

/// R_Omega(Z): entry (i,j) becomes t_ij * Z_ij where t_ij is the
/// multiplicity of (i,j); zero off the sample support.
Matrix apply_romega(const SampleMultiset& omega, const Matrix& z);

/// <R_Omega(Z), W> = sum over the multiset of Z_ij * W_ij, duplicates
/// counted. Symmetric in Z and W.
double romega_inner(const SampleMultiset& omega, const Matrix& z,
                    const Matrix& w);

/// A sample together with the observed entry values. Duplicated pairs must
/// carry identical values.
class ObservationSet {
 public:
  ObservationSet(SampleMultiset sample, std::vector<double> values);

  const SampleMultiset& sample() const { return sample_; }
  const std::vector<double>& values() const { return values_; }

  /// Observed values aligned with sample().cells().
  const std::vector<double>& cell_values() const { return cell_values_; }

 private:
  SampleMultiset sample_;
  std::vector<double> values_;
  std::vector<double> cell_values_;
};

/// Reads the sampled entries out of `a`.
ObservationSet observe(const Matrix& a, const SampleMultiset& omega);

/// Observation file format: first line `m n count`, then `count` lines
/// `i j value` with 1-based indices, duplicates as repeated lines. Values
/// round-trip bit-exactly.
ObservationSet read_observations(const std::string& path);
void write_observations(const ObservationSet& obs, const std::string& path);

}  // namespace nnmc
