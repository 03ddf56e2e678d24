#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace genregraph {

// Process exit codes of a pipeline run.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitEmptyNetwork = 3,
  kExitNoConvergence = 4,
  kExitIo = 5,
};

struct PipelineConfig {
  std::string ratings;
  std::string subjects;  // optional; subject stages are skipped when empty
  std::string mode = "both";  // reader | enjoyment | both
  int rating_threshold = 4;
  int min_books_per_user = 2;
  int min_readers_per_book = 10;
  int subject_min_count = 13;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  bool sub_communities = false;
  bool dedupe = false;
  int top_n = 20;
  // Not part of the manifest: neither changes any output byte.
  std::filesystem::path output_dir;
  int threads = 1;
};

// Throws ConfigError on out-of-range values.
void validate(const PipelineConfig& cfg);

// Manifest round trip. The manifest echoes every setting that influences
// the outputs.
nlohmann::json to_manifest(const PipelineConfig& cfg);
// Overlays the manifest's settings onto `cfg`.
void apply_manifest(const nlohmann::json& manifest, PipelineConfig& cfg);

// Parses inputs once, then for each requested mode: build network ->
// louvain -> centralities -> subjects -> enrichment -> PCA -> reports, into
// output_dir/<mode>/. Writes output_dir/manifest.json. Errors are logged
// and mapped onto ExitCode.
int run_pipeline(const PipelineConfig& cfg);

}  // namespace genregraph
