#include "genregraph/project.hpp"

#include <algorithm>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "genregraph/error.hpp"

namespace genregraph {
namespace {

// Rebuilds a graph from kept users, kept books and kept edges, preserving
// the source's insertion order.
template <typename KeepUser, typename KeepBook, typename KeepEdge>
RatingGraph rebuild(const RatingGraph& g, KeepUser keep_user,
                    KeepBook keep_book, KeepEdge keep_edge) {
  RatingGraph::Builder builder;
  constexpr Index kDropped = ~Index{0};
  std::vector<Index> user_map(g.num_users(), kDropped);
  std::vector<Index> book_map(g.num_books(), kDropped);
  for (Index u = 0; u < g.num_users(); ++u) {
    if (keep_user(u)) user_map[u] = builder.add_user(g.user_ids()[u]);
  }
  for (Index b = 0; b < g.num_books(); ++b) {
    if (keep_book(b)) book_map[b] = builder.add_book(g.book_ids()[b]);
  }
  for (const auto& e : g.edges()) {
    if (user_map[e.user] == kDropped || book_map[e.book] == kDropped) continue;
    if (!keep_edge(e)) continue;
    builder.add_rating(user_map[e.user], book_map[e.book], e.stars);
  }
  return std::move(builder).build();
}

using PairCounts = std::unordered_map<std::uint64_t, std::uint32_t>;

void count_pairs(const RatingGraph& g, Index first_user, Index last_user,
                 PairCounts& counts) {
  for (Index u = first_user; u < last_user; ++u) {
    const auto books = g.books_of(u);
    for (std::size_t i = 0; i < books.size(); ++i) {
      const std::uint64_t hi = static_cast<std::uint64_t>(books[i]) << 32;
      for (std::size_t j = i + 1; j < books.size(); ++j) {
        ++counts[hi | books[j]];
      }
    }
  }
}

}  // namespace

std::string_view to_string(NetworkMode mode) {
  return mode == NetworkMode::kReader ? "reader" : "enjoyment";
}

NetworkMode parse_network_mode(std::string_view text) {
  if (text == "reader") return NetworkMode::kReader;
  if (text == "enjoyment") return NetworkMode::kEnjoyment;
  throw ConfigError(fmt::format("unknown network mode '{}'", text));
}

void validate(const ProjectionConfig& cfg) {
  if (cfg.rating_threshold < kMinStars || cfg.rating_threshold > kMaxStars) {
    throw ConfigError(fmt::format("rating threshold {} outside [{}, {}]",
                                  cfg.rating_threshold, kMinStars, kMaxStars));
  }
  if (cfg.min_books_per_user < 0 || cfg.min_readers_per_book < 0) {
    throw ConfigError("filter minimums must be >= 0");
  }
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

RatingGraph filter_users(const RatingGraph& g, int min_books) {
  if (min_books <= 0) return g;
  const auto min = static_cast<std::size_t>(min_books);
  std::vector<char> kept_book(g.num_books(), 0);
  for (Index u = 0; u < g.num_users(); ++u) {
    if (g.user_degree(u) < min) continue;
    for (Index b : g.books_of(u)) kept_book[b] = 1;
  }
  return rebuild(
      g, [&](Index u) { return g.user_degree(u) >= min; },
      [&](Index b) { return kept_book[b] != 0; },
      [](const Rating&) { return true; });
}

RatingGraph filter_by_rating(const RatingGraph& g, int threshold) {
  return rebuild(
      g, [](Index) { return true; }, [](Index) { return true; },
      [&](const Rating& e) { return e.stars >= threshold; });
}

RatingGraph filter_books(const RatingGraph& g, int min_readers) {
  if (min_readers <= 0) return g;
  const auto min = static_cast<std::size_t>(min_readers);
  return rebuild(
      g, [](Index) { return true; },
      [&](Index b) { return g.book_degree(b) >= min; },
      [](const Rating&) { return true; });
}

SimilarityGraph project_jaccard(const RatingGraph& g, int threads) {
  const auto n_users = static_cast<Index>(g.num_users());
  const auto workers = static_cast<Index>(
      std::clamp<std::int64_t>(threads, 1, std::max<Index>(n_users, 1)));

  std::vector<PairCounts> partial(workers);
  if (workers == 1) {
    count_pairs(g, 0, n_users, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    for (Index w = 0; w < workers; ++w) {
      const Index first = static_cast<Index>(
          static_cast<std::uint64_t>(n_users) * w / workers);
      const Index last = static_cast<Index>(
          static_cast<std::uint64_t>(n_users) * (w + 1) / workers);
      pool.emplace_back([&g, &partial, w, first, last] {
        count_pairs(g, first, last, partial[w]);
      });
    }
  }
  // Integer sums commute, so the merged counts do not depend on the split.
  PairCounts& counts = partial[0];
  for (Index w = 1; w < workers; ++w) {
    for (const auto& [key, c] : partial[w]) counts[key] += c;
    PairCounts().swap(partial[w]);
  }

  // Nodes are sorted by id; remap book indices onto that order.
  std::vector<Index> order(g.num_books());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return g.book_ids()[a] < g.book_ids()[b];
  });
  std::vector<Index> rank(g.num_books());
  std::vector<std::string> nodes;
  nodes.reserve(order.size());
  for (Index r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    nodes.push_back(g.book_ids()[order[r]]);
  }

  std::vector<WeightedEdge> edges;
  edges.reserve(counts.size());
  for (const auto& [key, shared] : counts) {
    const auto a = static_cast<Index>(key >> 32);
    const auto b = static_cast<Index>(key & 0xffffffffu);
    const auto uni = g.book_degree(a) + g.book_degree(b) - shared;
    edges.push_back({rank[a], rank[b],
                     static_cast<double>(shared) / static_cast<double>(uni)});
  }
  return SimilarityGraph(std::move(nodes), std::move(edges));
}

SimilarityGraph build_network(const RatingGraph& g,
                              const ProjectionConfig& cfg) {
  validate(cfg);
  RatingGraph filtered = filter_users(g, cfg.min_books_per_user);
  if (cfg.mode == NetworkMode::kEnjoyment) {
    filtered = filter_by_rating(filtered, cfg.rating_threshold);
  }
  filtered = filter_books(filtered, cfg.min_readers_per_book);
  if (filtered.num_books() == 0) {
    throw EmptyResultError(
        fmt::format("no books left in the {} network after filtering",
                    to_string(cfg.mode)));
  }
  return project_jaccard(filtered, cfg.threads);
}

}  // namespace genregraph
