#pragma once

#include <string_view>

#include "genregraph/model.hpp"

namespace genregraph {

enum class NetworkMode { kReader, kEnjoyment };

std::string_view to_string(NetworkMode mode);
// Accepts "reader" and "enjoyment"; throws ConfigError otherwise.
NetworkMode parse_network_mode(std::string_view text);

struct ProjectionConfig {
  NetworkMode mode = NetworkMode::kReader;
  // Ratings at or above this count as enjoyed.
  int rating_threshold = 4;
  // Users with fewer books are dropped before anything else.
  int min_books_per_user = 2;
  // Books with fewer (post rating-filter) readers are dropped before
  // projection.
  int min_readers_per_book = 10;
  // Workers used by the projection; results do not depend on it.
  int threads = 1;
};

void validate(const ProjectionConfig& cfg);

// Keeps users with degree >= min_books and all of their edges. Books left
// without an edge are dropped.
RatingGraph filter_users(const RatingGraph& g, int min_books);

// Drops edges rated below `threshold`. Every user and book stays as a node.
RatingGraph filter_by_rating(const RatingGraph& g, int threshold);

// Drops books with degree < min_readers along with their edges. Users stay.
RatingGraph filter_books(const RatingGraph& g, int min_readers);

// Jaccard projection onto the books: w(i,j) = |R_i & R_j| / |R_i | R_j|
// for every pair sharing at least one reader. Nodes are all books of `g`,
// sorted by id. Ratings are ignored.
SimilarityGraph project_jaccard(const RatingGraph& g, int threads = 1);

// Filters then projects. Reader mode: users -> books -> project.
// Enjoyment mode: users -> rating -> books -> project. Throws
// EmptyResultError when no book survives.
SimilarityGraph build_network(const RatingGraph& g,
                              const ProjectionConfig& cfg);

}  // namespace genregraph
