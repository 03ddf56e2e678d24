#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace genregraph {

// Dense index of an interned user or book id.
using Index = std::uint32_t;
using CommunityId = std::uint32_t;

inline constexpr int kMinStars = 1;
inline constexpr int kMaxStars = 5;

struct Rating {
  Index user;
  Index book;
  int stars;
};

// Transparent hashing so maps keyed by std::string accept string_view
// lookups without allocating.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
using IdLookup =
    std::unordered_map<std::string, Index, StringHash, std::equal_to<>>;

// Bipartite user->book graph with integer star ratings. Immutable once
// built; construct through RatingGraph::Builder.
class RatingGraph {
 public:
  enum class DuplicatePolicy { kError, kKeepMax };

  class Builder {
   public:
    explicit Builder(DuplicatePolicy policy = DuplicatePolicy::kError)
        : policy_(policy) {}

    Index add_user(std::string_view id);
    Index add_book(std::string_view id);

    // Adds the edge, interning both endpoints. Throws InvalidArgument on a
    // rating outside [1,5] or, under kError, on a repeated (user, book).
    void add_rating(std::string_view user, std::string_view book, int stars);
    void add_rating(Index user, Index book, int stars);

    RatingGraph build() &&;

   private:
    DuplicatePolicy policy_;
    std::vector<std::string> users_;
    std::vector<std::string> books_;
    IdLookup user_index_;
    IdLookup book_index_;
    std::vector<Rating> edges_;
    std::unordered_map<std::uint64_t, std::size_t> edge_slot_;
  };

  RatingGraph() = default;

  std::size_t num_users() const { return users_.size(); }
  std::size_t num_books() const { return books_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<std::string>& user_ids() const { return users_; }
  const std::vector<std::string>& book_ids() const { return books_; }
  // Edges in insertion order.
  std::span<const Rating> edges() const { return edges_; }

  std::optional<Index> find_user(std::string_view id) const;
  std::optional<Index> find_book(std::string_view id) const;

  // Users adjacent to `book`, ascending by index.
  std::span<const Index> readers(Index book) const;
  // Books adjacent to `user`, ascending by index.
  std::span<const Index> books_of(Index user) const;

  std::size_t user_degree(Index user) const { return books_of(user).size(); }
  std::size_t book_degree(Index book) const { return readers(book).size(); }

 private:
  std::vector<std::string> users_;
  std::vector<std::string> books_;
  IdLookup user_index_;
  IdLookup book_index_;
  std::vector<Rating> edges_;
  std::vector<std::size_t> book_offsets_;
  std::vector<Index> book_readers_;
  std::vector<std::size_t> user_offsets_;
  std::vector<Index> user_books_;
};

// The set of users who rated `book`, sorted by id. Throws NotFoundError
// for an unknown book.
std::vector<std::string> reader_set(const RatingGraph& g,
                                    std::string_view book);

struct WeightedEdge {
  Index source;  // source < target
  Index target;
  double weight;
};

struct Neighbor {
  Index node;
  double weight;
};

// Undirected weighted book-book network. Each unordered pair is stored at
// most once, with a weight in (0, 1] for projected graphs; pairs without an
// edge simply have no entry.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  // Validates the invariants (unique ids, no self-loops, no repeated pair,
  // positive finite weights) and sorts edges by (source, target).
  SimilarityGraph(std::vector<std::string> nodes,
                  std::vector<WeightedEdge> edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<std::string>& node_ids() const { return nodes_; }
  std::span<const WeightedEdge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(Index node) const;

  std::optional<Index> find(std::string_view id) const;
  // Weight of the edge {a, b}, 0 when absent.
  double weight(Index a, Index b) const;
  double total_weight() const { return total_weight_; }

 private:
  std::vector<std::string> nodes_;
  IdLookup index_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  double total_weight_ = 0.0;
};

// Non-overlapping assignment of nodes to communities 0..k-1.
class Partition {
 public:
  Partition() = default;

  // Relabels arbitrary labels densely in order of first appearance.
  static Partition from_labels(std::vector<std::string> nodes,
                               std::span<const std::int64_t> labels);
  // Every node of the graph in its own community.
  static Partition singletons(const SimilarityGraph& g);
  // Every node of the graph in community 0.
  static Partition whole(const SimilarityGraph& g);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_communities() const { return sizes_.size(); }
  const std::vector<std::string>& node_ids() const { return nodes_; }
  std::span<const CommunityId> assignment() const { return assignment_; }
  std::span<const std::size_t> sizes() const { return sizes_; }

  std::optional<CommunityId> community_of(std::string_view node) const;
  // Node ids of community `c`, sorted.
  std::vector<std::string> members(CommunityId c) const;

  // Community of every node of `g`, in g's index order. Throws
  // InvalidArgument if the partition misses a node.
  std::vector<CommunityId> labels_for(const SimilarityGraph& g) const;

 private:
  std::vector<std::string> nodes_;
  IdLookup index_;
  std::vector<CommunityId> assignment_;
  std::vector<std::size_t> sizes_;
};

// book id -> set of subject labels.
class SubjectCatalog {
 public:
  using Subjects = std::set<std::string>;

  SubjectCatalog() = default;
  // Trims every subject and rejects empty ones with InvalidArgument.
  explicit SubjectCatalog(std::map<std::string, Subjects> subjects);

  // Empty set for books the catalog does not know.
  const Subjects& subjects_of(std::string_view book) const;
  const std::map<std::string, Subjects, std::less<>>& entries() const {
    return entries_;
  }
  std::size_t num_books() const { return entries_.size(); }
  // Distinct subjects across all books.
  std::set<std::string> all_subjects() const;

 private:
  std::map<std::string, Subjects, std::less<>> entries_;
};

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Per-community subject prevalence. Rows are subjects, columns are
// communities; entry(s, c) is the share of c's subject-bearing books that
// carry s.
struct CommunitySubjectMatrix {
  std::vector<std::string> subjects;
  std::vector<CommunityId> communities;
  // Subject-bearing books per community (the column denominators).
  std::vector<std::size_t> subject_bearing_books;
  Matrix entries;
};

struct PcaResult {
  std::vector<std::string> individuals;  // subjects
  std::vector<CommunityId> variables;    // communities
  Matrix loadings;  // dimensions x variables, unit-norm rows
  Matrix scores;    // individuals x dimensions
  std::vector<double> singular_values;
  std::vector<double> explained_variance_ratio;

  std::size_t num_dims() const { return loadings.rows(); }
};

}  // namespace genregraph
