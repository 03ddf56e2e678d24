#include "genregraph/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "genregraph/error.hpp"
#include "genregraph/random.hpp"

namespace genregraph {
namespace {

// Working graph for one Louvain level. Self-loops hold twice the internal
// weight of the merged nodes, so degree(i) = sum(adjacency) + self_loop.
struct LevelGraph {
  std::vector<std::size_t> offsets;
  std::vector<Neighbor> adjacency;
  std::vector<double> self_loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return degree.size(); }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return std::span<const Neighbor>(adjacency)
        .subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

LevelGraph from_similarity(const SimilarityGraph& g) {
  LevelGraph lg;
  const auto n = g.num_nodes();
  lg.offsets.assign(n + 1, 0);
  lg.self_loop.assign(n, 0.0);
  lg.degree.assign(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    const auto row = g.neighbors(i);
    lg.offsets[i + 1] = lg.offsets[i] + row.size();
    lg.adjacency.insert(lg.adjacency.end(), row.begin(), row.end());
    double k = 0.0;
    for (const auto& nb : row) k += nb.weight;
    lg.degree[i] = k;
    lg.two_m += k;
  }
  return lg;
}

// Moves nodes until no move improves modularity by more than min_gain.
// Returns true if any node changed community.
bool local_moves(const LevelGraph& lg, const LouvainConfig& cfg, Rng& rng,
                 std::vector<std::uint32_t>& community) {
  const auto n = lg.size();
  community.resize(n);
  std::iota(community.begin(), community.end(), std::uint32_t{0});
  if (lg.two_m <= 0.0) return false;

  std::vector<double> total(lg.degree);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  shuffle(std::span<std::uint32_t>(order), rng);

  const double m = lg.two_m / 2.0;
  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (const auto node : order) {
      const auto home = community[node];
      const double k = lg.degree[node];
      for (const auto& nb : lg.neighbors(node)) {
        const auto c = community[nb.node];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += nb.weight;
      }
      total[home] -= k;

      const double scale = cfg.resolution * k / lg.two_m;
      const double stay = link[home] - scale * total[home];
      std::uint32_t best = home;
      double best_gain = 0.0;
      bool found = false;
      for (const auto c : touched) {
        if (c == home) continue;
        const double gain = link[c] - scale * total[c];
        if (!found || gain > best_gain || (gain == best_gain && c < best)) {
          best = c;
          best_gain = gain;
          found = true;
        }
      }
      if (!found || !((best_gain - stay) / m > cfg.min_gain)) best = home;

      total[best] += k;
      if (best != home) {
        community[node] = best;
        moved = true;
        any_move = true;
      }
      for (const auto c : touched) link[c] = 0.0;
      touched.clear();
    }
  }
  return any_move;
}

// Renumbers communities densely by first appearance in node order.
std::uint32_t renumber(std::vector<std::uint32_t>& community) {
  std::vector<std::uint32_t> dense(community.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& c : community) {
    if (dense[c] == UINT32_MAX) dense[c] = next++;
    c = dense[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& lg,
                     const std::vector<std::uint32_t>& community,
                     std::uint32_t count) {
  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::uint32_t i = 0; i < lg.size(); ++i) {
    members[community[i]].push_back(i);
  }

  LevelGraph out;
  out.offsets.assign(count + 1, 0);
  out.self_loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.two_m = lg.two_m;
  std::vector<double> link(count, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < count; ++c) {
    for (const auto i : members[c]) {
      out.self_loop[c] += lg.self_loop[i];
      out.degree[c] += lg.degree[i];
      for (const auto& nb : lg.neighbors(i)) {
        const auto d = community[nb.node];
        if (d == c) {
          // Each internal edge is seen from both ends, giving the 2x
          // self-loop convention.
          out.self_loop[c] += nb.weight;
          continue;
        }
        if (link[d] == 0.0) touched.push_back(d);
        link[d] += nb.weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const auto d : touched) {
      out.adjacency.push_back({d, link[d]});
      link[d] = 0.0;
    }
    touched.clear();
    out.offsets[c + 1] = out.adjacency.size();
  }
  return out;
}

}  // namespace

void validate(const LouvainConfig& cfg) {
  if (!(cfg.resolution > 0.0) || !std::isfinite(cfg.resolution)) {
    throw ConfigError(fmt::format("resolution must be > 0, got {}",
                                  cfg.resolution));
  }
  if (cfg.max_passes < 1) throw ConfigError("max_passes must be >= 1");
  if (!(cfg.min_gain >= 0.0)) throw ConfigError("min_gain must be >= 0");
}

double modularity(const SimilarityGraph& g, const Partition& p,
                  double resolution) {
  if (g.num_nodes() == 0) throw InvalidArgument("modularity of empty graph");
  const auto labels = p.labels_for(g);
  const std::size_t k = p.num_communities();
  // internal[c] sums intra-community edges once; cut[c] sums edges leaving
  // c. Community degree is 2 * internal + cut, which keeps the
  // single-community case exactly zero.
  std::vector<double> internal(k, 0.0);
  std::vector<double> cut(k, 0.0);
  double m = 0.0;
  for (const auto& e : g.edges()) {
    const auto a = labels[e.source];
    const auto b = labels[e.target];
    if (a == b) {
      internal[a] += e.weight;
    } else {
      cut[a] += e.weight;
      cut[b] += e.weight;
    }
    m += e.weight;
  }
  if (!(m > 0.0)) throw InvalidArgument("modularity of graph with no edges");
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double share = (2.0 * internal[c] + cut[c]) / (2.0 * m);
    q += internal[c] / m - resolution * share * share;
  }
  return q;
}

Partition louvain(const SimilarityGraph& g, const LouvainConfig& cfg) {
  validate(cfg);
  if (g.num_nodes() == 0) throw InvalidArgument("louvain on empty graph");
  Rng rng(cfg.seed);

  // membership[v] is the level-graph node holding original node v.
  std::vector<std::uint32_t> membership(g.num_nodes());
  std::iota(membership.begin(), membership.end(), std::uint32_t{0});
  LevelGraph level = from_similarity(g);
  std::vector<std::uint32_t> community;
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    if (!local_moves(level, cfg, rng, community)) break;
    const auto count = renumber(community);
    for (auto& v : membership) v = community[v];
    level = aggregate(level, community, count);
  }

  std::vector<std::int64_t> labels(membership.begin(), membership.end());
  return Partition::from_labels(g.node_ids(), labels);
}

SimilarityGraph subgraph(const SimilarityGraph& g, const Partition& p,
                         CommunityId c) {
  if (c >= p.num_communities()) {
    throw NotFoundError(fmt::format("unknown community {}", c));
  }
  const auto labels = p.labels_for(g);
  constexpr Index kOutside = ~Index{0};
  std::vector<Index> local(g.num_nodes(), kOutside);
  std::vector<std::string> nodes;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (labels[i] != c) continue;
    local[i] = static_cast<Index>(nodes.size());
    nodes.push_back(g.node_ids()[i]);
  }
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.edges()) {
    if (local[e.source] != kOutside && local[e.target] != kOutside) {
      edges.push_back({local[e.source], local[e.target], e.weight});
    }
  }
  return SimilarityGraph(std::move(nodes), std::move(edges));
}

std::uint64_t sub_community_seed(std::uint64_t seed, CommunityId c) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(c) + 1));
}

std::map<CommunityId, Partition> sub_communities(const SimilarityGraph& g,
                                                 const Partition& p,
                                                 const LouvainConfig& cfg) {
  std::map<CommunityId, Partition> out;
  for (CommunityId c = 0; c < p.num_communities(); ++c) {
    LouvainConfig local = cfg;
    local.seed = sub_community_seed(cfg.seed, c);
    out.emplace(c, louvain(subgraph(g, p, c), local));
  }
  return out;
}

double nmi(const Partition& a, const Partition& b) {
  const auto n = a.num_nodes();
  if (n != b.num_nodes()) {
    throw InvalidArgument("nmi: partitions cover different node counts");
  }
  if (n == 0) throw InvalidArgument("nmi: empty partitions");
  std::vector<CommunityId> other(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = b.community_of(a.node_ids()[i]);
    if (!c) {
      throw InvalidArgument(fmt::format(
          "nmi: node '{}' missing from second partition", a.node_ids()[i]));
    }
    other[i] = *c;
  }

  std::map<std::pair<CommunityId, CommunityId>, std::size_t> joint;
  for (std::size_t i = 0; i < n; ++i) ++joint[{a.assignment()[i], other[i]}];

  // A one-to-one contingency table means the partitions are relabelings.
  if (joint.size() == a.num_communities() &&
      joint.size() == b.num_communities()) {
    return 1.0;
  }

  const double total = static_cast<double>(n);
  const auto entropy = [total](std::span<const std::size_t> sizes) {
    double h = 0.0;
    for (auto s : sizes) {
      if (s == 0) continue;
      const double q = static_cast<double>(s) / total;
      h -= q * std::log(q);
    }
    return h;
  };
  const double ha = entropy(a.sizes());
  const double hb = entropy(b.sizes());
  double mutual = 0.0;
  for (const auto& [cell, count] : joint) {
    const double pij = static_cast<double>(count) / total;
    const double pa = static_cast<double>(a.sizes()[cell.first]) / total;
    const double pb = static_cast<double>(b.sizes()[cell.second]) / total;
    mutual += pij * std::log(pij / (pa * pb));
  }
  if (ha + hb <= 0.0) return 1.0;
  return std::clamp(2.0 * mutual / (ha + hb), 0.0, 1.0);
}

}  // namespace genregraph
