#pragma once

#include <map>
#include <string>
#include <vector>

#include "genregraph/model.hpp"

namespace genregraph {

inline constexpr int kDefaultSubjectMinCount = 13;

// Removes, from every book, each subject carried by fewer than min_count
// of the in-scope books. Books stay in the catalog even when left without
// subjects. Idempotent.
SubjectCatalog prune_subjects(const SubjectCatalog& catalog,
                              const std::vector<std::string>& books_in_scope,
                              int min_count = kDefaultSubjectMinCount);

// Rows: every subject carried by a partitioned book, sorted. Columns:
// communities in id order. Books without subjects do not count towards a
// column's denominator; a column with no subject-bearing book is all zero
// and logged as a warning.
CommunitySubjectMatrix community_subject_matrix(const SubjectCatalog& catalog,
                                                const Partition& p);

// Number of partitioned books carrying each subject.
std::map<std::string, std::size_t> subject_book_counts(
    const SubjectCatalog& catalog, const Partition& p);

struct EnrichmentRow {
  std::string subject;
  CommunityId community;
  double in_community_proportion;
  double global_proportion;
  double lift;
  double g_statistic;
};

struct EnrichmentReport {
  // Grouped by community id; within a community by descending lift, then
  // subject.
  std::vector<EnrichmentRow> rows;
  std::vector<std::size_t> community_totals;  // subject-bearing books
  std::size_t total_books = 0;                // subject-bearing books
};

// Log-likelihood ratio statistic of a 2x2 table [[a, b], [c, d]].
double g_statistic(double a, double b, double c, double d);

// For each (subject, community): lift = (p_in + alpha) / (p_global + alpha)
// with alpha = 1 / total subject-bearing books, and the G statistic of the
// in/out-of-community x has/lacks-subject table. Throws InvalidArgument if
// global_counts and the matrix disagree on the subject universe.
EnrichmentReport enrichment(
    const CommunitySubjectMatrix& m,
    const std::map<std::string, std::size_t>& global_counts);

}  // namespace genregraph
