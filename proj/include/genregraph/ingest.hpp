#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "genregraph/model.hpp"

namespace genregraph {

struct ParseOptions {
  // Keep the highest rating of a repeated (user, book) line instead of
  // failing.
  bool dedupe = false;
};

// Reads `user<TAB>book<TAB>stars` lines. Blank lines and lines starting
// with '#' are skipped; CRLF endings are accepted. Errors carry the 1-based
// line number.
RatingGraph parse_ratings(std::istream& in, const ParseOptions& options = {});

// Reads `book<TAB>subject` lines into a catalog; repeated pairs collapse.
SubjectCatalog parse_subjects(std::istream& in);

// Writes the graph in the format parse_ratings reads, edges in insertion
// order.
void write_ratings(const RatingGraph& g, std::ostream& out);
void write_subjects(const SubjectCatalog& catalog, std::ostream& out);

struct SynthConfig {
  int k = 4;
  int books_per_community = 50;
  int users_per_community = 500;
  int reads_per_user = 15;
  double p_in = 0.9;
  double p_enjoy_in = 0.8;
  double p_enjoy_out = 0.3;
  int subjects_per_community = 3;
  std::uint64_t seed = 0;
};

// Throws ConfigError when a probability leaves [0,1], a count is < 1, or
// reads_per_user exceeds the total number of books.
void validate(const SynthConfig& cfg);

struct SyntheticCorpus {
  RatingGraph ratings;
  SubjectCatalog subjects;
  Partition planted;  // over every book, book ids sorted
};

inline constexpr int kSyntheticDislike = 2;
inline constexpr int kSyntheticEnjoy = 5;

// Planted-community corpus. Users belong to a home community; each read is
// drawn from the home community with probability p_in and otherwise
// uniformly from the other communities' books. Reads are enjoyed (rated 5,
// else 2) with p_enjoy_in at home and p_enjoy_out elsewhere. Book `b` of
// community `c` is named "c<c>_b<b>" and carries subjects "c<c>_s<j>".
SyntheticCorpus generate_synthetic(const SynthConfig& cfg);

}  // namespace genregraph
