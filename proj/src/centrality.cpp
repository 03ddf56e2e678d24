#include "genregraph/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "genregraph/community.hpp"
#include "genregraph/error.hpp"

namespace genregraph {

std::string_view to_string(CentralityMeasure measure) {
  return measure == CentralityMeasure::kWeightedDegree ? "weighted_degree"
                                                       : "eigenvector";
}

double CentralityScores::at(std::string_view node) const {
  const auto it = std::find(nodes.begin(), nodes.end(), node);
  if (it == nodes.end()) {
    throw NotFoundError(fmt::format("no score for node '{}'", node));
  }
  return values[static_cast<std::size_t>(it - nodes.begin())];
}

CentralityScores weighted_degree(const SimilarityGraph& g) {
  CentralityScores out{CentralityMeasure::kWeightedDegree, g.node_ids(),
                       std::vector<double>(g.num_nodes(), 0.0)};
  for (Index i = 0; i < g.num_nodes(); ++i) {
    for (const auto& nb : g.neighbors(i)) out.values[i] += nb.weight;
  }
  return out;
}

std::vector<std::size_t> component_sizes(const SimilarityGraph& g) {
  const auto n = g.num_nodes();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> sizes;
  std::vector<Index> stack;
  for (Index start = 0; start < n; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    stack.push_back(start);
    std::size_t size = 0;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      ++size;
      for (const auto& nb : g.neighbors(v)) {
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          stack.push_back(nb.node);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

CentralityScores eigenvector_centrality(const SimilarityGraph& g, double tol,
                                        int max_iter) {
  const auto n = g.num_nodes();
  if (n == 0) throw InvalidArgument("eigenvector centrality of empty graph");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");

  if (const auto sizes = component_sizes(g); sizes.size() > 1) {
    spdlog::warn(
        "eigenvector centrality on a disconnected graph, component sizes {}; "
        "nodes outside the dominant component may score ~0",
        sizes);
  }

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  double residual = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (Index i = 0; i < n; ++i) {
      double acc = x[i];
      for (const auto& nb : g.neighbors(i)) acc += nb.weight * x[nb.node];
      next[i] = acc;
    }
    const double norm =
        std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    residual = 0.0;
    for (Index i = 0; i < n; ++i) {
      next[i] /= norm;
      residual = std::max(residual, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    if (residual < tol) {
      return {CentralityMeasure::kEigenvector, g.node_ids(), std::move(x)};
    }
  }
  throw ConvergenceError(
      fmt::format("eigenvector centrality did not converge in {} iterations "
                  "(residual {:.3e})",
                  max_iter, residual),
      residual, max_iter);
}

std::vector<RankedBook> rank_scores(const CentralityScores& scores,
                                    std::size_t n) {
  std::vector<std::size_t> order(scores.nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores.values[a] != scores.values[b]) {
      return scores.values[a] > scores.values[b];
    }
    return scores.nodes[a] < scores.nodes[b];
  });
  std::vector<RankedBook> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) {
    out.push_back({scores.nodes[order[i]], scores.values[order[i]]});
  }
  return out;
}

std::vector<RankedBook> top_books(const SimilarityGraph& g, const Partition& p,
                                  CommunityId c, CentralityMeasure measure,
                                  std::size_t n) {
  if (n < 1) throw InvalidArgument("top_books needs n >= 1");
  const auto sub = subgraph(g, p, c);
  const auto scores = measure == CentralityMeasure::kWeightedDegree
                          ? weighted_degree(sub)
                          : eigenvector_centrality(sub);
  return rank_scores(scores, n);
}

}  // namespace genregraph
