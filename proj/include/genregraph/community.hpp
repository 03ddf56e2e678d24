#pragma once

#include <cstdint>
#include <map>

#include "genregraph/model.hpp"

namespace genregraph {

struct LouvainConfig {
  // Multiplier on the null-model term; larger values yield more, smaller
  // communities.
  double resolution = 1.0;
  std::uint64_t seed = 0;
  // Cap on aggregation levels.
  int max_passes = 100;
  // A local move must raise modularity by more than this.
  double min_gain = 1e-9;
};

void validate(const LouvainConfig& cfg);

// Weighted modularity with resolution:
//   Q = 1/(2m) sum_ij [A_ij - resolution * k_i k_j / (2m)] delta(c_i, c_j)
// Throws InvalidArgument if the partition misses a node or the graph has no
// edge weight.
double modularity(const SimilarityGraph& g, const Partition& p,
                  double resolution = 1.0);

// Two-phase Louvain: seeded shuffled local moves to convergence, then
// aggregation, repeated while any node moves. Ties between candidate
// communities go to the smallest id. Deterministic for a fixed seed.
Partition louvain(const SimilarityGraph& g, const LouvainConfig& cfg = {});

// Induced subgraph on community `c`, nodes kept in g's order. Throws
// NotFoundError for an unknown community.
SimilarityGraph subgraph(const SimilarityGraph& g, const Partition& p,
                         CommunityId c);

// Louvain on every community's induced subgraph. Community c is seeded
// with sub_community_seed(cfg.seed, c).
std::map<CommunityId, Partition> sub_communities(const SimilarityGraph& g,
                                                 const Partition& p,
                                                 const LouvainConfig& cfg = {});

std::uint64_t sub_community_seed(std::uint64_t seed, CommunityId c);

// Normalized mutual information 2 I(a;b) / (H(a) + H(b)), in [0, 1].
// Exactly 1 when the partitions agree up to relabeling. Throws
// InvalidArgument when the node sets differ.
double nmi(const Partition& a, const Partition& b);

}  // namespace genregraph
