#include "genregraph/subjects.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "genregraph/error.hpp"

namespace genregraph {

SubjectCatalog prune_subjects(const SubjectCatalog& catalog,
                              const std::vector<std::string>& books_in_scope,
                              int min_count) {
  if (min_count < 0) throw InvalidArgument("min_count must be >= 0");
  std::map<std::string, std::size_t> counts;
  const std::set<std::string> scope(books_in_scope.begin(),
                                    books_in_scope.end());
  for (const auto& book : scope) {
    for (const auto& s : catalog.subjects_of(book)) ++counts[s];
  }
  const auto min = static_cast<std::size_t>(min_count);
  std::map<std::string, SubjectCatalog::Subjects> kept;
  for (const auto& [book, subjects] : catalog.entries()) {
    auto& out = kept[book];
    for (const auto& s : subjects) {
      const auto it = counts.find(s);
      const std::size_t c = it == counts.end() ? 0 : it->second;
      if (c >= min) out.insert(s);
    }
  }
  return SubjectCatalog(std::move(kept));
}

CommunitySubjectMatrix community_subject_matrix(const SubjectCatalog& catalog,
                                                const Partition& p) {
  if (p.num_nodes() == 0) throw InvalidArgument("empty partition");
  const auto k = p.num_communities();
  std::map<std::string, std::vector<std::size_t>> counts;
  std::vector<std::size_t> bearing(k, 0);
  for (std::size_t i = 0; i < p.num_nodes(); ++i) {
    const auto& subjects = catalog.subjects_of(p.node_ids()[i]);
    if (subjects.empty()) continue;
    const auto c = p.assignment()[i];
    ++bearing[c];
    for (const auto& s : subjects) {
      auto& row = counts[s];
      if (row.empty()) row.assign(k, 0);
      ++row[c];
    }
  }

  CommunitySubjectMatrix m;
  m.communities.resize(k);
  for (CommunityId c = 0; c < k; ++c) {
    m.communities[c] = c;
    if (bearing[c] == 0) {
      spdlog::warn("community {} has no book with a subject; its column is zero",
                   c);
    }
  }
  m.subject_bearing_books = bearing;
  m.entries = Matrix(counts.size(), k);
  std::size_t r = 0;
  for (const auto& [subject, row] : counts) {
    m.subjects.push_back(subject);
    for (std::size_t c = 0; c < k; ++c) {
      if (bearing[c] > 0) {
        m.entries(r, c) =
            static_cast<double>(row[c]) / static_cast<double>(bearing[c]);
      }
    }
    ++r;
  }
  return m;
}

std::map<std::string, std::size_t> subject_book_counts(
    const SubjectCatalog& catalog, const Partition& p) {
  std::map<std::string, std::size_t> counts;
  for (const auto& book : p.node_ids()) {
    for (const auto& s : catalog.subjects_of(book)) ++counts[s];
  }
  return counts;
}

double g_statistic(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  if (n <= 0.0) return 0.0;
  const double rows[2] = {a + b, c + d};
  const double cols[2] = {a + c, b + d};
  const double observed[2][2] = {{a, b}, {c, d}};
  double g = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double o = observed[i][j];
      if (o <= 0.0) continue;
      g += o * std::log(o * n / (rows[i] * cols[j]));
    }
  }
  return std::max(0.0, 2.0 * g);
}

EnrichmentReport enrichment(
    const CommunitySubjectMatrix& m,
    const std::map<std::string, std::size_t>& global_counts) {
  if (global_counts.size() != m.subjects.size()) {
    throw InvalidArgument(fmt::format(
        "subject universe mismatch: matrix has {} subjects, counts have {}",
        m.subjects.size(), global_counts.size()));
  }
  EnrichmentReport report;
  report.community_totals = m.subject_bearing_books;
  for (auto n : m.subject_bearing_books) report.total_books += n;
  if (report.total_books == 0) {
    throw InvalidArgument("enrichment needs at least one subject-bearing book");
  }
  const double total = static_cast<double>(report.total_books);
  const double alpha = 1.0 / total;

  const auto k = m.communities.size();
  std::vector<std::vector<EnrichmentRow>> per_community(k);
  for (std::size_t r = 0; r < m.subjects.size(); ++r) {
    const auto& subject = m.subjects[r];
    const auto it = global_counts.find(subject);
    if (it == global_counts.end()) {
      throw InvalidArgument(fmt::format(
          "subject universe mismatch: '{}' has no global count", subject));
    }
    const double carrying = static_cast<double>(it->second);
    const double global = carrying / total;
    for (std::size_t c = 0; c < k; ++c) {
      const double size = static_cast<double>(m.subject_bearing_books[c]);
      const double in = std::round(m.entries(r, c) * size);
      const double a = in;
      const double b = size - in;
      const double cc = carrying - in;
      const double d = total - size - carrying + in;
      if (b < 0 || cc < 0 || d < 0) {
        throw InvalidArgument(fmt::format(
            "global count for '{}' inconsistent with community {}", subject,
            m.communities[c]));
      }
      const double share = m.entries(r, c);
      per_community[c].push_back({subject, m.communities[c], share, global,
                                  (share + alpha) / (global + alpha),
                                  g_statistic(a, b, cc, d)});
    }
  }
  for (auto& rows : per_community) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.lift != y.lift) return x.lift > y.lift;
      return x.subject < y.subject;
    });
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

}  // namespace genregraph
