#include "genregraph/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "genregraph/error.hpp"

namespace genregraph {
namespace {

constexpr int kMaxSweeps = 100;
// Dimensions whose singular value falls below this fraction of the largest
// carry no variance.
constexpr double kRankTolerance = 1e-10;

double column_dot(const Matrix& a, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
  return s;
}

void rotate_columns(Matrix& a, std::size_t i, std::size_t j, double c,
                    double s) {
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double x = a(r, i);
    const double y = a(r, j);
    a(r, i) = c * x - s * y;
    a(r, j) = s * x + c * y;
  }
}

}  // namespace

Svd jacobi_svd(const Matrix& input) {
  Matrix a = input;
  const auto p = a.cols();
  Matrix v(p, p);
  for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double alpha = column_dot(a, i, i);
        const double beta = column_dot(a, j, j);
        const double gamma = column_dot(a, i, j);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_columns(a, i, j, c, s);
        rotate_columns(v, i, j, c, s);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(p);
  for (std::size_t j = 0; j < p; ++j) sigma[j] = std::sqrt(column_dot(a, j, j));
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto x, auto y) { return sigma[x] > sigma[y]; });

  Svd out;
  out.v = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    out.singular_values.push_back(sigma[order[k]]);
    for (std::size_t r = 0; r < p; ++r) out.v(r, k) = v(r, order[k]);
  }
  return out;
}

PcaResult run_pca(const CommunitySubjectMatrix& m, const PcaConfig& cfg) {
  const auto n = m.entries.rows();
  const auto p = m.entries.cols();
  if (n < 2 || p < 2) {
    throw InvalidArgument(fmt::format(
        "PCA needs at least 2 subjects and 2 communities, got {} x {}", n, p));
  }
  if (cfg.n_dims && *cfg.n_dims < 1) {
    throw InvalidArgument("n_dims must be >= 1");
  }

  Matrix x = m.entries;
  double raw_scale = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      mean += x(r, c);
      raw_scale = std::max(raw_scale, std::abs(x(r, c)));
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      x(r, c) -= mean;
      ss += x(r, c) * x(r, c);
    }
    if (cfg.standardize) {
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(sd > 1e-12 * std::max(raw_scale, 1.0))) {
        throw InvalidArgument(fmt::format(
            "community {} has zero variance; cannot standardize",
            m.communities[c]));
      }
      for (std::size_t r = 0; r < n; ++r) x(r, c) /= sd;
    }
  }

  const Svd svd = jacobi_svd(x);
  const double top = svd.singular_values.front();
  if (!(top > 1e-12 * std::max(raw_scale, 1.0))) {
    throw InvalidArgument("PCA input has zero total variance");
  }
  std::size_t rank = 0;
  double total = 0.0;
  for (double s : svd.singular_values) {
    if (s <= kRankTolerance * top) break;
    ++rank;
    total += s * s;
  }
  const std::size_t dims = cfg.n_dims ? std::min(*cfg.n_dims, rank) : rank;

  PcaResult r;
  r.individuals = m.subjects;
  r.variables = m.communities;
  r.loadings = Matrix(dims, p);
  r.scores = Matrix(n, dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double s = svd.singular_values[d];
    r.singular_values.push_back(s);
    r.explained_variance_ratio.push_back(s * s / total);
    std::size_t biggest = 0;
    for (std::size_t c = 1; c < p; ++c) {
      if (std::abs(svd.v(c, d)) > std::abs(svd.v(biggest, d))) biggest = c;
    }
    const double sign = svd.v(biggest, d) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < p; ++c) r.loadings(d, c) = sign * svd.v(c, d);
    for (std::size_t row = 0; row < n; ++row) {
      double acc = 0.0;
      for (std::size_t c = 0; c < p; ++c) acc += x(row, c) * r.loadings(d, c);
      r.scores(row, d) = acc;
    }
  }
  return r;
}

Extremes extreme_subjects(const PcaResult& r, std::size_t dim, std::size_t n) {
  if (dim >= r.num_dims()) {
    throw InvalidArgument(fmt::format("dimension {} out of range (have {})",
                                      dim + 1, r.num_dims()));
  }
  if (n < 1) throw InvalidArgument("extreme_subjects needs n >= 1");
  Extremes out;
  for (std::size_t i = 0; i < r.individuals.size(); ++i) {
    const double s = r.scores(i, dim);
    (s >= 0.0 ? out.positive : out.negative).push_back({r.individuals[i], s});
  }
  std::sort(out.positive.begin(), out.positive.end(),
            [](const auto& a, const auto& b) {
              return a.score != b.score ? a.score > b.score
                                        : a.subject < b.subject;
            });
  std::sort(out.negative.begin(), out.negative.end(),
            [](const auto& a, const auto& b) {
              return a.score != b.score ? a.score < b.score
                                        : a.subject < b.subject;
            });
  if (out.positive.size() > n) out.positive.resize(n);
  if (out.negative.size() > n) out.negative.resize(n);
  return out;
}

Plane plane_coordinates(const PcaResult& r) {
  if (r.num_dims() < 2) {
    throw InvalidArgument(fmt::format(
        "the plane needs two dimensions, PCA kept {}", r.num_dims()));
  }
  Plane plane;
  for (std::size_t c = 0; c < r.variables.size(); ++c) {
    plane.communities.push_back({std::to_string(r.variables[c]),
                                 {r.loadings(0, c), r.loadings(1, c)}});
  }
  for (std::size_t i = 0; i < r.individuals.size(); ++i) {
    plane.subjects.push_back(
        {r.individuals[i], {r.scores(i, 0), r.scores(i, 1)}});
  }
  return plane;
}

Matrix column_correlations(const CommunitySubjectMatrix& m) {
  const auto n = m.entries.rows();
  const auto p = m.entries.cols();
  Matrix centered = m.entries;
  std::vector<double> norm(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += centered(r, c);
    mean /= static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t r = 0; r < n; ++r) {
      centered(r, c) -= mean;
      norm[c] += centered(r, c) * centered(r, c);
    }
    norm[c] = std::sqrt(norm[c]);
  }
  Matrix corr(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (norm[i] == 0.0 || norm[j] == 0.0) {
        corr(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      corr(i, j) = i == j ? 1.0
                          : column_dot(centered, i, j) / (norm[i] * norm[j]);
    }
  }
  return corr;
}

}  // namespace genregraph
