#include "genregraph/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "genregraph/error.hpp"
#include "oracles.hpp"

namespace genregraph {
namespace {

CommunitySubjectMatrix make_matrix(const Eigen::MatrixXd& x) {
  CommunitySubjectMatrix m;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    m.subjects.push_back(fmt::format("s{:03}", r));
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    m.communities.push_back(static_cast<CommunityId>(c));
    m.subject_bearing_books.push_back(10);
  }
  m.entries = Matrix(static_cast<std::size_t>(x.rows()),
                     static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) m.entries(r, c) = x(r, c);
  }
  return m;
}

Eigen::MatrixXd random_data(oracle::Rng& rng, int rows, int cols) {
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) x(r, c) = oracle::uniform(rng, 0, 1);
  }
  return x;
}

double ratio_sum(const PcaResult& r) {
  return std::accumulate(r.explained_variance_ratio.begin(),
                         r.explained_variance_ratio.end(), 0.0);
}

TEST(JacobiSvdTest, MatchesEigenSingularValues) {
  oracle::Rng rng(1);
  const auto x = random_data(rng, 12, 4);
  const auto svd = jacobi_svd(make_matrix(x).entries);
  Eigen::JacobiSVD<Eigen::MatrixXd> ref(x);
  ASSERT_EQ(svd.singular_values.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(svd.singular_values[i], ref.singularValues()(i), 1e-12);
  }
}

TEST(PcaTest, RankOneExplainsEverything) {
  Eigen::VectorXd u(6), v(3);
  u << 1, 2, 3, 4, 5, 7;
  v << 0.5, -1.0, 2.0;
  const auto r = run_pca(make_matrix(u * v.transpose()));
  ASSERT_EQ(r.num_dims(), 1u);
  EXPECT_NEAR(r.explained_variance_ratio[0], 1.0, 1e-12);
}

TEST(PcaTest, IdenticalRowsHaveNoVariance) {
  Eigen::MatrixXd x(4, 3);
  x.rowwise() = Eigen::RowVector3d(0.1, 0.2, 0.3);
  EXPECT_THROW(run_pca(make_matrix(x)), InvalidArgument);
}

TEST(PcaTest, RejectsTooSmall) {
  oracle::Rng rng(2);
  EXPECT_THROW(run_pca(make_matrix(random_data(rng, 1, 3))), InvalidArgument);
  EXPECT_THROW(run_pca(make_matrix(random_data(rng, 5, 1))), InvalidArgument);
}

TEST(PcaTest, ReconstructionAndCovarianceOracle) {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_data(rng, 30, 5);
    const auto r = run_pca(make_matrix(x));
    ASSERT_EQ(r.num_dims(), 5u);
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const auto scores = oracle::to_eigen(r.scores);
    const auto loadings = oracle::to_eigen(r.loadings);
    EXPECT_LE((scores * loadings - centered).cwiseAbs().maxCoeff(), 1e-8);

    const auto [values, vectors] = oracle::covariance_eigen(x);
    for (int d = 0; d < 5; ++d) {
      EXPECT_NEAR(r.explained_variance_ratio[d], values(d) / values.sum(),
                  1e-9);
      // Loadings agree with the covariance eigenvectors up to sign.
      EXPECT_NEAR(std::abs(loadings.row(d).dot(vectors.col(d))), 1.0, 1e-9);
    }
    EXPECT_NEAR(ratio_sum(r), 1.0, 1e-9);
    for (int d = 1; d < 5; ++d) {
      EXPECT_LE(r.explained_variance_ratio[d],
                r.explained_variance_ratio[d - 1]);
    }
  }
}

TEST(PcaTest, LoadingsOrthonormalWithSignConvention) {
  oracle::Rng rng(4);
  const auto r = run_pca(make_matrix(random_data(rng, 25, 6)));
  const auto l = oracle::to_eigen(r.loadings);
  const Eigen::MatrixXd gram = l * l.transpose();
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  for (Eigen::Index d = 0; d < l.rows(); ++d) {
    Eigen::Index at = 0;
    l.row(d).cwiseAbs().maxCoeff(&at);
    EXPECT_GT(l(d, at), 0.0);
  }
  EXPECT_LE(r.num_dims(), 6u);
}

TEST(PcaTest, RankTwoFixture) {
  oracle::Rng rng(5);
  const Eigen::MatrixXd x =
      random_data(rng, 40, 2) * random_data(rng, 2, 6) +
      1e-6 * random_data(rng, 40, 6);
  const auto r = run_pca(make_matrix(x));
  EXPECT_GE(r.explained_variance_ratio[0] + r.explained_variance_ratio[1],
            0.999);
}

TEST(PcaTest, TwoCommunitiesOnUnitCircle) {
  oracle::Rng rng(6);
  const auto r = run_pca(make_matrix(random_data(rng, 20, 2)));
  const auto plane = plane_coordinates(r);
  ASSERT_EQ(plane.communities.size(), 2u);
  for (const auto& pt : plane.communities) {
    EXPECT_NEAR(std::hypot(pt.coords[0], pt.coords[1]), 1.0, 1e-9);
  }
}

TEST(PcaTest, PlaneMatchesProjection) {
  oracle::Rng rng(7);
  const auto x = random_data(rng, 15, 4);
  const auto r = run_pca(make_matrix(x));
  const auto plane = plane_coordinates(r);
  const auto [values, vectors] = oracle::covariance_eigen(x);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  for (int d = 0; d < 2; ++d) {
    Eigen::VectorXd axis = vectors.col(d);
    Eigen::Index at = 0;
    axis.cwiseAbs().maxCoeff(&at);
    if (axis(at) < 0) axis = -axis;
    const Eigen::VectorXd projected = centered * axis;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      EXPECT_NEAR(plane.subjects[i].coords[d], projected(i), 1e-9);
    }
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      EXPECT_NEAR(plane.communities[c].coords[d], axis(c), 1e-9);
    }
  }
  EXPECT_EQ(plane.subjects[0].label, "s000");
  EXPECT_EQ(plane.communities[1].label, "1");
}

TEST(PcaTest, PlaneNeedsTwoDimensions) {
  Eigen::VectorXd u(4), v(3);
  u << 1, 2, 3, 5;
  v << 1, 1, 2;
  EXPECT_THROW(plane_coordinates(run_pca(make_matrix(u * v.transpose()))),
               InvalidArgument);
}

TEST(PcaTest, RowPermutationInvariant) {
  oracle::Rng rng(8);
  const auto x = random_data(rng, 20, 4);
  Eigen::MatrixXd y(x.rows(), x.cols());
  std::vector<int> order(20);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::swap(order[3], order[11]);
  for (int i = 0; i < 20; ++i) y.row(i) = x.row(order[i]);
  const auto a = run_pca(make_matrix(x));
  const auto b = run_pca(make_matrix(y));
  EXPECT_LE((oracle::to_eigen(a.loadings) - oracle::to_eigen(b.loadings))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  for (int i = 0; i < 20; ++i) {
    for (std::size_t d = 0; d < a.num_dims(); ++d) {
      EXPECT_NEAR(b.scores(i, d), a.scores(order[i], d), 1e-9);
    }
  }
}

TEST(PcaTest, StandardizeAndTruncate) {
  oracle::Rng rng(9);
  auto x = random_data(rng, 10, 3);
  PcaConfig cfg;
  cfg.standardize = true;
  const auto r = run_pca(make_matrix(x), cfg);
  EXPECT_NEAR(ratio_sum(r), 1.0, 1e-9);
  cfg.n_dims = 2;
  EXPECT_EQ(run_pca(make_matrix(x), cfg).num_dims(), 2u);
  x.col(1).setConstant(0.4);
  cfg.n_dims.reset();
  try {
    run_pca(make_matrix(x), cfg);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("community 1"), std::string::npos)
        << e.what();
  }
}

TEST(ExtremesTest, FullListSplitsAtZero) {
  oracle::Rng rng(10);
  const auto r = run_pca(make_matrix(random_data(rng, 9, 3)));
  const auto e = extreme_subjects(r, 0, 100);
  EXPECT_EQ(e.positive.size() + e.negative.size(), 9u);
  for (std::size_t i = 1; i < e.positive.size(); ++i) {
    EXPECT_GE(e.positive[i - 1].score, e.positive[i].score);
  }
  for (std::size_t i = 1; i < e.negative.size(); ++i) {
    EXPECT_LE(e.negative[i - 1].score, e.negative[i].score);
  }
  for (const auto& s : e.positive) EXPECT_GE(s.score, 0.0);
  for (const auto& s : e.negative) EXPECT_LT(s.score, 0.0);
  EXPECT_THROW(extreme_subjects(r, r.num_dims(), 3), InvalidArgument);
}

TEST(ExtremesTest, NegatedDimensionSwapsSides) {
  oracle::Rng rng(11);
  auto r = run_pca(make_matrix(random_data(rng, 12, 4)));
  const auto before = extreme_subjects(r, 1, 3);
  for (std::size_t i = 0; i < r.scores.rows(); ++i) r.scores(i, 1) *= -1;
  for (std::size_t c = 0; c < r.loadings.cols(); ++c) r.loadings(1, c) *= -1;
  const auto after = extreme_subjects(r, 1, 3);
  ASSERT_EQ(before.positive.size(), after.negative.size());
  for (std::size_t i = 0; i < before.positive.size(); ++i) {
    EXPECT_EQ(before.positive[i].subject, after.negative[i].subject);
    EXPECT_EQ(before.positive[i].score, -after.negative[i].score);
  }
  for (std::size_t i = 0; i < before.negative.size(); ++i) {
    EXPECT_EQ(before.negative[i].subject, after.positive[i].subject);
  }
}

// Adult-thriller subjects concentrate in communities 0-1, children's
// subjects in 2-3; the filler is spread evenly.
TEST(ExtremesTest, BlocksOccupyOppositeEnds) {
  oracle::Rng rng(12);
  CommunitySubjectMatrix m;
  m.communities = {0, 1, 2, 3};
  m.subject_bearing_books = {50, 50, 50, 50};
  std::vector<std::array<double, 4>> rows;
  for (int i = 0; i < 5; ++i) {
    m.subjects.push_back(fmt::format("adult_thriller_{}", i));
    rows.push_back({0.6 + 0.05 * i, 0.55, 0.02, 0.03});
  }
  for (int i = 0; i < 5; ++i) {
    m.subjects.push_back(fmt::format("children_{}", i));
    rows.push_back({0.02, 0.04, 0.6 + 0.05 * i, 0.5});
  }
  for (int i = 0; i < 20; ++i) {
    m.subjects.push_back(fmt::format("filler_{:02}", i));
    const double base = oracle::uniform(rng, 0.1, 0.3);
    rows.push_back({base + oracle::uniform(rng, -0.02, 0.02),
                    base + oracle::uniform(rng, -0.02, 0.02),
                    base + oracle::uniform(rng, -0.02, 0.02),
                    base + oracle::uniform(rng, -0.02, 0.02)});
  }
  m.entries = Matrix(rows.size(), 4);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < 4; ++c) m.entries(r, c) = rows[r][c];
  }
  const auto e = extreme_subjects(run_pca(m), 0, 5);
  const auto prefix = [](const std::vector<ScoredSubject>& side) {
    std::set<std::string> out;
    for (const auto& s : side) out.insert(s.subject.substr(0, 5));
    return out;
  };
  ASSERT_EQ(e.positive.size(), 5u);
  ASSERT_EQ(e.negative.size(), 5u);
  const auto pos = prefix(e.positive);
  const auto neg = prefix(e.negative);
  EXPECT_EQ(pos.size(), 1u);
  EXPECT_EQ(neg.size(), 1u);
  EXPECT_NE(*pos.begin(), *neg.begin());
  EXPECT_TRUE(pos.count("adult") || neg.count("adult"));
  EXPECT_TRUE(pos.count("child") || neg.count("child"));
}

TEST(CorrelationTest, MatchesPearsonAndFlagsConstant) {
  oracle::Rng rng(13);
  auto x = random_data(rng, 15, 3);
  x.col(2).setConstant(0.5);
  const auto corr = column_correlations(make_matrix(x));
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const double expected =
      c.col(0).dot(c.col(1)) / (c.col(0).norm() * c.col(1).norm());
  EXPECT_NEAR(corr(0, 1), expected, 1e-12);
  EXPECT_NEAR(corr(0, 0), 1.0, 1e-12);
  EXPECT_TRUE(std::isnan(corr(0, 2)));
}

}  // namespace
}  // namespace genregraph
