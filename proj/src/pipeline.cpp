#include "genregraph/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "genregraph/centrality.hpp"
#include "genregraph/community.hpp"
#include "genregraph/error.hpp"
#include "genregraph/export.hpp"
#include "genregraph/ingest.hpp"
#include "genregraph/pca.hpp"
#include "genregraph/project.hpp"
#include "genregraph/subjects.hpp"

namespace genregraph {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kManifestFormat = 1;

// Logs the elapsed time of a stage when it goes out of scope.
class StageTimer {
 public:
  explicit StageTimer(std::string name)
      : name_(std::move(name)), start_(Clock::now()) {}
  ~StageTimer() {
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() -
                                                              start_)
                        .count();
    spdlog::info("{} done in {:.1f} ms", name_, ms);
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  std::string name_;
  Clock::time_point start_;
};

std::vector<NetworkMode> requested_modes(const std::string& mode) {
  if (mode == "both") return {NetworkMode::kReader, NetworkMode::kEnjoyment};
  return {parse_network_mode(mode)};
}

RatingGraph load_ratings(const PipelineConfig& cfg) {
  std::ifstream in(cfg.ratings, std::ios::binary);
  if (!in) {
    throw ParseError(fmt::format("cannot open ratings file '{}'", cfg.ratings));
  }
  try {
    return parse_ratings(in, ParseOptions{cfg.dedupe});
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", cfg.ratings, e.what()), e.line());
  }
}

SubjectCatalog load_subjects(const PipelineConfig& cfg) {
  if (cfg.subjects.empty()) return {};
  std::ifstream in(cfg.subjects, std::ios::binary);
  if (!in) {
    throw ParseError(
        fmt::format("cannot open subjects file '{}'", cfg.subjects));
  }
  try {
    return parse_subjects(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", cfg.subjects, e.what()), e.line());
  }
}

// Community-restricted centralities over every node of the network.
std::vector<CentralityScores> community_scores(const SimilarityGraph& g,
                                               const Partition& p) {
  CentralityScores degree{CentralityMeasure::kWeightedDegree, {}, {}};
  CentralityScores eigen{CentralityMeasure::kEigenvector, {}, {}};
  for (CommunityId c = 0; c < p.num_communities(); ++c) {
    const auto sub = subgraph(g, p, c);
    auto wd = weighted_degree(sub);
    auto ev = eigenvector_centrality(sub);
    degree.nodes.insert(degree.nodes.end(), wd.nodes.begin(), wd.nodes.end());
    degree.values.insert(degree.values.end(), wd.values.begin(),
                         wd.values.end());
    eigen.nodes.insert(eigen.nodes.end(), ev.nodes.begin(), ev.nodes.end());
    eigen.values.insert(eigen.values.end(), ev.values.begin(),
                        ev.values.end());
  }
  return {std::move(degree), std::move(eigen)};
}

std::vector<std::string> relative_outputs(const fs::path& root,
                                          const ReportBundle& b) {
  std::vector<std::string> out;
  const auto add = [&](const std::optional<fs::path>& p) {
    if (p) out.push_back(fs::relative(*p, root).generic_string());
  };
  add(b.network);
  add(b.network_summary);
  add(b.membership);
  add(b.community_summary);
  add(b.top_books);
  add(b.enrichment);
  add(b.correlations);
  add(b.pca_variance);
  add(b.pca_loadings);
  add(b.pca_scores);
  add(b.pca_extremes);
  add(b.pca_plane);
  add(b.sub_communities);
  return out;
}

ReportBundle run_mode(const PipelineConfig& cfg, NetworkMode mode,
                      const RatingGraph& ratings,
                      const SubjectCatalog& catalog) {
  const auto label = std::string(to_string(mode));
  ProjectionConfig pc;
  pc.mode = mode;
  pc.rating_threshold = cfg.rating_threshold;
  pc.min_books_per_user = cfg.min_books_per_user;
  pc.min_readers_per_book = cfg.min_readers_per_book;
  pc.threads = cfg.threads;

  SimilarityGraph network;
  {
    StageTimer t(label + " projection");
    network = build_network(ratings, pc);
    spdlog::info("{} network: {} books, {} edges", label, network.num_nodes(),
                 network.num_edges());
  }
  if (network.num_edges() == 0) {
    throw EmptyResultError(
        fmt::format("the {} network has no edges to partition", label));
  }

  LouvainConfig lc;
  lc.resolution = cfg.resolution;
  lc.seed = cfg.seed;
  Partition partition;
  double q = 0.0;
  {
    StageTimer t(label + " louvain");
    partition = louvain(network, lc);
    q = modularity(network, partition, cfg.resolution);
    spdlog::info("{} network: {} communities, modularity {:.4f}", label,
                 partition.num_communities(), q);
  }

  ReportInputs in;
  in.graph = &network;
  in.partition = &partition;
  in.modularity = q;
  in.top_n = static_cast<std::size_t>(cfg.top_n);
  {
    StageTimer t(label + " centrality");
    in.scores = community_scores(network, partition);
  }

  if (!cfg.subjects.empty()) {
    StageTimer t(label + " subjects");
    const auto pruned =
        prune_subjects(catalog, network.node_ids(), cfg.subject_min_count);
    auto matrix = community_subject_matrix(pruned, partition);
    spdlog::info("{} network: {} subjects after pruning", label,
                 matrix.subjects.size());
    if (matrix.subjects.empty()) {
      spdlog::warn("{} network: no subject survives pruning; skipping "
                   "enrichment and PCA",
                   label);
    } else {
      in.enrichment =
          enrichment(matrix, subject_book_counts(pruned, partition));
      try {
        in.pca = run_pca(matrix);
      } catch (const InvalidArgument& e) {
        spdlog::warn("{} network: PCA skipped: {}", label, e.what());
      }
      in.matrix = std::move(matrix);
    }
  }

  if (cfg.sub_communities) {
    StageTimer t(label + " sub-communities");
    in.sub_communities = genregraph::sub_communities(network, partition, lc);
  }

  StageTimer t(label + " reports");
  return write_reports(cfg.output_dir / label, in);
}

void write_manifest(const fs::path& path, const nlohmann::json& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {}", path.string()));
  out << manifest.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  if (cfg.ratings.empty()) throw ConfigError("a ratings file is required");
  if (cfg.output_dir.empty()) throw ConfigError("an output directory is required");
  requested_modes(cfg.mode);
  ProjectionConfig pc;
  pc.rating_threshold = cfg.rating_threshold;
  pc.min_books_per_user = cfg.min_books_per_user;
  pc.min_readers_per_book = cfg.min_readers_per_book;
  pc.threads = cfg.threads;
  validate(pc);
  LouvainConfig lc;
  lc.resolution = cfg.resolution;
  validate(lc);
  if (cfg.subject_min_count < 0) {
    throw ConfigError("subject-min-count must be >= 0");
  }
  if (cfg.top_n < 1) throw ConfigError("top-n must be >= 1");
}

nlohmann::json to_manifest(const PipelineConfig& cfg) {
  const LouvainConfig lc;
  return {
      {"format", kManifestFormat},
      {"ratings", cfg.ratings},
      {"subjects", cfg.subjects},
      {"mode", cfg.mode},
      {"rating_threshold", cfg.rating_threshold},
      {"min_books_per_user", cfg.min_books_per_user},
      {"min_readers_per_book", cfg.min_readers_per_book},
      {"subject_min_count", cfg.subject_min_count},
      {"resolution", cfg.resolution},
      {"seed", cfg.seed},
      {"sub_communities", cfg.sub_communities},
      {"dedupe", cfg.dedupe},
      {"top_n", cfg.top_n},
      {"louvain", {{"max_passes", lc.max_passes}, {"min_gain", lc.min_gain}}},
      {"eigenvector",
       {{"tolerance", kEigenvectorTolerance},
        {"max_iterations", kEigenvectorMaxIterations}}},
      {"pca", {{"standardize", false}}},
  };
}

void apply_manifest(const nlohmann::json& manifest, PipelineConfig& cfg) {
  try {
    if (manifest.value("format", 0) != kManifestFormat) {
      throw ConfigError("unsupported manifest format");
    }
    cfg.ratings = manifest.at("ratings").get<std::string>();
    cfg.subjects = manifest.at("subjects").get<std::string>();
    cfg.mode = manifest.at("mode").get<std::string>();
    cfg.rating_threshold = manifest.at("rating_threshold").get<int>();
    cfg.min_books_per_user = manifest.at("min_books_per_user").get<int>();
    cfg.min_readers_per_book = manifest.at("min_readers_per_book").get<int>();
    cfg.subject_min_count = manifest.at("subject_min_count").get<int>();
    cfg.resolution = manifest.at("resolution").get<double>();
    cfg.seed = manifest.at("seed").get<std::uint64_t>();
    cfg.sub_communities = manifest.at("sub_communities").get<bool>();
    cfg.dedupe = manifest.at("dedupe").get<bool>();
    cfg.top_n = manifest.at("top_n").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("invalid manifest: {}", e.what()));
  }
}

int run_pipeline(const PipelineConfig& cfg) {
  try {
    validate(cfg);
    RatingGraph ratings;
    SubjectCatalog catalog;
    {
      StageTimer t("ingest");
      ratings = load_ratings(cfg);
      catalog = load_subjects(cfg);
      spdlog::info("ingested {} users, {} books, {} ratings; {} books with "
                   "subjects",
                   ratings.num_users(), ratings.num_books(),
                   ratings.num_edges(), catalog.num_books());
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
      throw IoError(fmt::format("cannot create {}: {}",
                                cfg.output_dir.string(), ec.message()));
    }

    auto manifest = to_manifest(cfg);
    for (const auto mode : requested_modes(cfg.mode)) {
      const auto bundle = run_mode(cfg, mode, ratings, catalog);
      manifest["outputs"][std::string(to_string(mode))] =
          relative_outputs(cfg.output_dir, bundle);
    }
    write_manifest(cfg.output_dir / "manifest.json", manifest);
    return kExitOk;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitParse;
  } catch (const EmptyResultError& e) {
    spdlog::error("{}", e.what());
    return kExitEmptyNetwork;
  } catch (const ConvergenceError& e) {
    spdlog::error("{}", e.what());
    return kExitNoConvergence;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
}

}  // namespace genregraph
