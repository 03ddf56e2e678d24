#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "genregraph/model.hpp"

namespace genregraph {

enum class CentralityMeasure { kWeightedDegree, kEigenvector };

std::string_view to_string(CentralityMeasure measure);

struct CentralityScores {
  CentralityMeasure measure;
  std::vector<std::string> nodes;  // graph order
  std::vector<double> values;      // parallel to nodes

  // Throws NotFoundError for an unknown node.
  double at(std::string_view node) const;
};

inline constexpr double kEigenvectorTolerance = 1e-10;
inline constexpr int kEigenvectorMaxIterations = 10000;

CentralityScores weighted_degree(const SimilarityGraph& g);

// Dominant eigenvector of the weighted adjacency matrix, non-negative and
// unit 2-norm. Iterates x <- (A + I) x / |(A + I) x| from the uniform
// vector until successive iterates differ by less than `tol` in max-norm;
// the identity shift leaves the eigenvectors alone and keeps bipartite
// components from oscillating. Throws ConvergenceError after max_iter
// iterations. Logs a warning listing component sizes when g is
// disconnected.
CentralityScores eigenvector_centrality(
    const SimilarityGraph& g, double tol = kEigenvectorTolerance,
    int max_iter = kEigenvectorMaxIterations);

// Sizes of the connected components, largest first.
std::vector<std::size_t> component_sizes(const SimilarityGraph& g);

struct RankedBook {
  std::string book;
  double score;
};

// Highest-scoring books of community `c`, with centrality computed on the
// community's induced subgraph. Descending score, ties by book id, at most
// n entries.
std::vector<RankedBook> top_books(const SimilarityGraph& g, const Partition& p,
                                  CommunityId c, CentralityMeasure measure,
                                  std::size_t n);

// Ranks precomputed scores the way top_books does.
std::vector<RankedBook> rank_scores(const CentralityScores& scores,
                                    std::size_t n);

}  // namespace genregraph
