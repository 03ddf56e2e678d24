#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "genregraph/model.hpp"

namespace genregraph {

struct PcaConfig {
  // Divide centered columns by their sample standard deviation.
  bool standardize = false;
  // Keep at most this many dimensions; all nonzero ones when unset.
  std::optional<std::size_t> n_dims;
};

// Thin SVD of a dense matrix by one-sided Jacobi rotations. Singular
// values descending; v holds the right singular vectors as columns.
struct Svd {
  std::vector<double> singular_values;
  Matrix v;
};
Svd jacobi_svd(const Matrix& a);

// PCA with subjects as individuals (rows) and communities as variables
// (columns). Columns are centered, optionally standardized, then
// decomposed by SVD. Only dimensions with nonzero variance are kept.
// Variance ratios are shares of the total variance, so they sum to 1 when
// every dimension is kept. Each loading row is flipped so that its
// largest-magnitude entry is positive. Throws InvalidArgument on fewer than
// 2 rows or columns, zero total variance, or a zero-variance column under
// standardization.
PcaResult run_pca(const CommunitySubjectMatrix& m, const PcaConfig& cfg = {});

struct ScoredSubject {
  std::string subject;
  double score;
};

struct Extremes {
  std::vector<ScoredSubject> positive;  // score >= 0, highest first
  std::vector<ScoredSubject> negative;  // score < 0, lowest first
};

// The n most extreme subjects on each side of dimension `dim` (0-based).
// Ties are broken by subject. Throws InvalidArgument for a bad dimension.
Extremes extreme_subjects(const PcaResult& r, std::size_t dim, std::size_t n);

struct PlanePoint {
  std::string label;
  std::array<double, 2> coords;
};

// Biplot on the first two dimensions: communities at their loading entries,
// subjects at their scores.
struct Plane {
  std::vector<PlanePoint> communities;
  std::vector<PlanePoint> subjects;
};

// Throws InvalidArgument when the result has fewer than two dimensions.
Plane plane_coordinates(const PcaResult& r);

// Pearson correlation between community columns. Entries involving a
// constant column are NaN.
Matrix column_correlations(const CommunitySubjectMatrix& m);

}  // namespace genregraph
