#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genregraph/centrality.hpp"
#include "genregraph/model.hpp"
#include "genregraph/subjects.hpp"

namespace genregraph {

// Shortest-safe decimal form used in every output file: 9 significant
// digits.
std::string format_real(double value);

// RFC 4180 field quoting: wraps in quotes when the field holds a comma,
// quote, CR or LF, doubling inner quotes.
std::string csv_field(std::string_view field);

// Writes one CSV record terminated by LF.
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// GEXF 1.2 document: undirected static graph, nodes and edges sorted by id,
// a `community` integer attribute plus one float attribute per score set.
// Throws InvalidArgument when the partition or a score set misses a node
// and IoError when the stream fails.
void write_gexf(const SimilarityGraph& g, const Partition& p,
                std::span<const CentralityScores> scores, std::ostream& out);

struct ReportInputs {
  const SimilarityGraph* graph = nullptr;
  const Partition* partition = nullptr;
  double modularity = 0.0;
  // Community-restricted scores over every node, one set per measure.
  std::vector<CentralityScores> scores;
  std::size_t top_n = 20;
  std::optional<EnrichmentReport> enrichment;
  std::optional<CommunitySubjectMatrix> matrix;
  std::optional<PcaResult> pca;
  std::size_t extremes_n = 10;
  std::optional<std::map<CommunityId, Partition>> sub_communities;
};

struct ReportBundle {
  std::filesystem::path network;
  std::filesystem::path network_summary;
  std::filesystem::path membership;
  std::filesystem::path community_summary;
  std::filesystem::path top_books;
  std::optional<std::filesystem::path> enrichment;
  std::optional<std::filesystem::path> correlations;
  std::optional<std::filesystem::path> pca_variance;
  std::optional<std::filesystem::path> pca_loadings;
  std::optional<std::filesystem::path> pca_scores;
  std::optional<std::filesystem::path> pca_extremes;
  std::optional<std::filesystem::path> pca_plane;
  std::optional<std::filesystem::path> sub_communities;
  std::optional<std::filesystem::path> manifest;
};

// Writes the GEXF network and CSV reports into `dir` (created if needed).
// Throws InvalidArgument when the inputs disagree on the node universe and
// IoError on any write failure.
ReportBundle write_reports(const std::filesystem::path& dir,
                           const ReportInputs& in);

// Percent of the network held by each community, in community id order.
std::vector<double> community_percentages(const Partition& p);

}  // namespace genregraph
