#include "genregraph/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "genregraph/error.hpp"

namespace genregraph {
namespace {

std::uint64_t pair_key(Index a, Index b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

Index intern(std::string_view id, std::vector<std::string>& names,
             IdLookup& lookup) {
  if (auto it = lookup.find(id); it != lookup.end()) return it->second;
  const auto idx = static_cast<Index>(names.size());
  names.emplace_back(id);
  lookup.emplace(names.back(), idx);
  return idx;
}

std::optional<Index> lookup_id(const IdLookup& lookup, std::string_view id) {
  if (auto it = lookup.find(id); it != lookup.end()) return it->second;
  return std::nullopt;
}

// Counting-sort adjacency: offsets has n+1 entries, targets sorted within a
// row because edges are scanned in key order below.
void build_csr(std::size_t n, std::span<const std::pair<Index, Index>> pairs,
               std::vector<std::size_t>& offsets, std::vector<Index>& targets) {
  offsets.assign(n + 1, 0);
  for (const auto& [row, col] : pairs) ++offsets[row + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  targets.resize(pairs.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [row, col] : pairs) targets[cursor[row]++] = col;
  for (std::size_t r = 0; r < n; ++r) {
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[r]),
              targets.begin() + static_cast<std::ptrdiff_t>(offsets[r + 1]));
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// RatingGraph

Index RatingGraph::Builder::add_user(std::string_view id) {
  return intern(id, users_, user_index_);
}

Index RatingGraph::Builder::add_book(std::string_view id) {
  return intern(id, books_, book_index_);
}

void RatingGraph::Builder::add_rating(std::string_view user,
                                      std::string_view book, int stars) {
  if (stars < kMinStars || stars > kMaxStars) {
    throw InvalidArgument(fmt::format("rating {} for ({}, {}) outside [{}, {}]",
                                      stars, user, book, kMinStars,
                                      kMaxStars));
  }
  add_rating(add_user(user), add_book(book), stars);
}

void RatingGraph::Builder::add_rating(Index user, Index book, int stars) {
  if (user >= users_.size() || book >= books_.size()) {
    throw InvalidArgument("rating endpoint not interned");
  }
  if (stars < kMinStars || stars > kMaxStars) {
    throw InvalidArgument(fmt::format("rating {} for ({}, {}) outside [{}, {}]",
                                      stars, users_[user], books_[book],
                                      kMinStars, kMaxStars));
  }
  const auto [it, inserted] =
      edge_slot_.try_emplace(pair_key(user, book), edges_.size());
  if (inserted) {
    edges_.push_back({user, book, stars});
    return;
  }
  if (policy_ == DuplicatePolicy::kError) {
    throw InvalidArgument(fmt::format("duplicate rating for ({}, {})",
                                      users_[user], books_[book]));
  }
  auto& existing = edges_[it->second];
  existing.stars = std::max(existing.stars, stars);
}

RatingGraph RatingGraph::Builder::build() && {
  RatingGraph g;
  g.users_ = std::move(users_);
  g.books_ = std::move(books_);
  g.user_index_ = std::move(user_index_);
  g.book_index_ = std::move(book_index_);
  g.edges_ = std::move(edges_);

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(g.edges_.size());
  for (const auto& e : g.edges_) pairs.emplace_back(e.book, e.user);
  build_csr(g.books_.size(), pairs, g.book_offsets_, g.book_readers_);
  for (auto& p : pairs) std::swap(p.first, p.second);
  build_csr(g.users_.size(), pairs, g.user_offsets_, g.user_books_);
  return g;
}

std::optional<Index> RatingGraph::find_user(std::string_view id) const {
  return lookup_id(user_index_, id);
}

std::optional<Index> RatingGraph::find_book(std::string_view id) const {
  return lookup_id(book_index_, id);
}

std::span<const Index> RatingGraph::readers(Index book) const {
  return std::span<const Index>(book_readers_)
      .subspan(book_offsets_[book], book_offsets_[book + 1] - book_offsets_[book]);
}

std::span<const Index> RatingGraph::books_of(Index user) const {
  return std::span<const Index>(user_books_)
      .subspan(user_offsets_[user], user_offsets_[user + 1] - user_offsets_[user]);
}

std::vector<std::string> reader_set(const RatingGraph& g,
                                    std::string_view book) {
  const auto idx = g.find_book(book);
  if (!idx) throw NotFoundError(fmt::format("unknown book '{}'", book));
  std::vector<std::string> out;
  for (Index u : g.readers(*idx)) out.push_back(g.user_ids()[u]);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// SimilarityGraph

SimilarityGraph::SimilarityGraph(std::vector<std::string> nodes,
                                 std::vector<WeightedEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (Index i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) {
      throw InvalidArgument(fmt::format("duplicate node id '{}'", nodes_[i]));
    }
  }
  const auto n = nodes_.size();
  for (auto& e : edges_) {
    if (e.source == e.target) {
      throw InvalidArgument("self-loop in similarity graph");
    }
    if (e.source >= n || e.target >= n) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument(fmt::format("edge weight {} is not positive",
                                        e.weight));
    }
    if (e.source > e.target) std::swap(e.source, e.target);
  }
  std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].source == edges_[i - 1].source &&
        edges_[i].target == edges_[i - 1].target) {
      throw InvalidArgument(
          fmt::format("repeated edge {{{}, {}}}", nodes_[edges_[i].source],
                      nodes_[edges_[i].target]));
    }
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.source + 1];
    ++offsets_[e.target + 1];
    total_weight_ += e.weight;
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (source, target), so each row fills in ascending
  // neighbor order: lower neighbors arrive first via their own rows.
  for (const auto& e : edges_) {
    adjacency_[cursor[e.target]++] = {e.source, e.weight};
  }
  for (const auto& e : edges_) {
    adjacency_[cursor[e.source]++] = {e.target, e.weight};
  }
}

std::span<const Neighbor> SimilarityGraph::neighbors(Index node) const {
  return std::span<const Neighbor>(adjacency_)
      .subspan(offsets_[node], offsets_[node + 1] - offsets_[node]);
}

std::optional<Index> SimilarityGraph::find(std::string_view id) const {
  return lookup_id(index_, id);
}

double SimilarityGraph::weight(Index a, Index b) const {
  if (a >= nodes_.size() || b >= nodes_.size() || a == b) return 0.0;
  const auto row = neighbors(a);
  const auto it = std::lower_bound(
      row.begin(), row.end(), b,
      [](const Neighbor& nb, Index target) { return nb.node < target; });
  return it != row.end() && it->node == b ? it->weight : 0.0;
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_labels(std::vector<std::string> nodes,
                                 std::span<const std::int64_t> labels) {
  if (nodes.size() != labels.size()) {
    throw InvalidArgument("partition: node and label counts differ");
  }
  Partition p;
  p.nodes_ = std::move(nodes);
  p.assignment_.resize(labels.size());
  std::unordered_map<std::int64_t, CommunityId> dense;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = dense.try_emplace(
        labels[i], static_cast<CommunityId>(dense.size()));
    if (inserted) p.sizes_.push_back(0);
    p.assignment_[i] = it->second;
    ++p.sizes_[it->second];
    if (!p.index_.emplace(p.nodes_[i], static_cast<Index>(i)).second) {
      throw InvalidArgument(
          fmt::format("partition: duplicate node '{}'", p.nodes_[i]));
    }
  }
  return p;
}

Partition Partition::singletons(const SimilarityGraph& g) {
  std::vector<std::int64_t> labels(g.num_nodes());
  std::iota(labels.begin(), labels.end(), 0);
  return from_labels(g.node_ids(), labels);
}

Partition Partition::whole(const SimilarityGraph& g) {
  std::vector<std::int64_t> labels(g.num_nodes(), 0);
  return from_labels(g.node_ids(), labels);
}

std::optional<CommunityId> Partition::community_of(
    std::string_view node) const {
  if (auto it = index_.find(node); it != index_.end()) {
    return assignment_[it->second];
  }
  return std::nullopt;
}

std::vector<std::string> Partition::members(CommunityId c) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (assignment_[i] == c) out.push_back(nodes_[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CommunityId> Partition::labels_for(const SimilarityGraph& g) const {
  std::vector<CommunityId> out(g.num_nodes());
  if (g.node_ids() == nodes_) {
    std::copy(assignment_.begin(), assignment_.end(), out.begin());
    return out;
  }
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto c = community_of(g.node_ids()[i]);
    if (!c) {
      throw InvalidArgument(
          fmt::format("partition has no community for node '{}'",
                      g.node_ids()[i]));
    }
    out[i] = *c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SubjectCatalog

SubjectCatalog::SubjectCatalog(std::map<std::string, Subjects> subjects) {
  for (auto& [book, set] : subjects) {
    Subjects cleaned;
    for (const auto& s : set) {
      auto t = trim(s);
      if (t.empty()) {
        throw InvalidArgument(
            fmt::format("empty subject label on book '{}'", book));
      }
      cleaned.insert(std::move(t));
    }
    entries_.emplace(book, std::move(cleaned));
  }
}

const SubjectCatalog::Subjects& SubjectCatalog::subjects_of(
    std::string_view book) const {
  static const Subjects kEmpty;
  if (auto it = entries_.find(book); it != entries_.end()) return it->second;
  return kEmpty;
}

std::set<std::string> SubjectCatalog::all_subjects() const {
  std::set<std::string> out;
  for (const auto& [book, set] : entries_) out.insert(set.begin(), set.end());
  return out;
}

}  // namespace genregraph
