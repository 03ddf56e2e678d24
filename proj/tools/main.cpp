// genregraph: book-genre network pipeline.
//
//   genregraph validate --ratings r.tsv [--subjects s.tsv]
//   genregraph run --ratings r.tsv --subjects s.tsv --output-dir out
//   genregraph synth --output-dir fixture [--k 4 ...]

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <utility>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "genregraph/error.hpp"
#include "genregraph/ingest.hpp"
#include "genregraph/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace genregraph;

namespace {

// Binds an option that can also come from GENREGRAPH_<NAME>.
template <typename T>
CLI::Option* add_env_option(CLI::App* app, const std::string& flag, T& value,
                  const std::string& help) {
  std::string env = "GENREGRAPH_";
  for (const char ch : flag.substr(2)) {
    env += ch == '-' ? '_' : static_cast<char>(std::toupper(ch));
  }
  return app->add_option(flag, value, help)->envname(env)->capture_default_str();
}

int run_validate(const std::string& ratings_path,
                 const std::string& subjects_path, bool dedupe) {
  try {
    std::ifstream ratings_in(ratings_path, std::ios::binary);
    if (!ratings_in) {
      throw ParseError("cannot open ratings file '" + ratings_path + "'");
    }
    const auto g = parse_ratings(ratings_in, ParseOptions{dedupe});
    std::cout << "ratings: " << g.num_users() << " users, " << g.num_books()
              << " books, " << g.num_edges() << " edges\n";
    if (!subjects_path.empty()) {
      std::ifstream subjects_in(subjects_path, std::ios::binary);
      if (!subjects_in) {
        throw ParseError("cannot open subjects file '" + subjects_path + "'");
      }
      const auto cat = parse_subjects(subjects_in);
      std::cout << "subjects: " << cat.num_books() << " books, "
                << cat.all_subjects().size() << " distinct subjects\n";
    }
    return kExitOk;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
}

int run_synth(const SynthConfig& cfg, const fs::path& dir) {
  try {
    const auto corpus = generate_synthetic(cfg);
    fs::create_directories(dir);
    std::ofstream ratings(dir / "ratings.tsv", std::ios::binary);
    std::ofstream subjects(dir / "subjects.tsv", std::ios::binary);
    std::ofstream planted(dir / "planted.tsv", std::ios::binary);
    if (!ratings || !subjects || !planted) {
      throw IoError("cannot write fixture files in " + dir.string());
    }
    write_ratings(corpus.ratings, ratings);
    write_subjects(corpus.subjects, subjects);
    const auto& p = corpus.planted;
    for (std::size_t i = 0; i < p.num_nodes(); ++i) {
      planted << p.node_ids()[i] << '\t' << p.assignment()[i] << '\n';
    }
    if (!planted) throw IoError("failed writing planted.tsv");
    spdlog::info("wrote {} ratings over {} books to {}",
                 corpus.ratings.num_edges(), corpus.ratings.num_books(),
                 dir.string());
    return kExitOk;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("genregraph"));

  CLI::App app{"Book similarity networks, communities and genre analysis"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->envname("GENREGRAPH_LOG_LEVEL");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Parse inputs only");
  std::string v_ratings, v_subjects;
  bool v_dedupe = false;
  validate_cmd->add_option("--ratings", v_ratings, "Ratings TSV")->required();
  validate_cmd->add_option("--subjects", v_subjects, "Subjects TSV");
  validate_cmd->add_flag("--dedupe", v_dedupe,
                         "Keep the highest of repeated ratings");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
  PipelineConfig cfg;
  std::string manifest_path;
  std::string output_dir;
  // Each entry copies one explicitly given flag over a replayed manifest.
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>>
      overrides;
  const auto track = [&](CLI::Option* opt, auto member) {
    overrides.emplace_back(opt, [&cfg, member](PipelineConfig& target) {
      target.*member = cfg.*member;
    });
  };
  track(add_env_option(run_cmd, "--ratings", cfg.ratings, "Ratings TSV"),
        &PipelineConfig::ratings);
  track(add_env_option(run_cmd, "--subjects", cfg.subjects, "Subjects TSV"),
        &PipelineConfig::subjects);
  track(add_env_option(run_cmd, "--mode", cfg.mode, "reader|enjoyment|both")
            ->check(CLI::IsMember({"reader", "enjoyment", "both"})),
        &PipelineConfig::mode);
  track(add_env_option(run_cmd, "--rating-threshold", cfg.rating_threshold,
             "Lowest rating that counts as enjoyed")
            ->check(CLI::Range(1, 5)),
        &PipelineConfig::rating_threshold);
  track(add_env_option(run_cmd, "--min-books-per-user", cfg.min_books_per_user,
             "Drop users with fewer books")
            ->check(CLI::NonNegativeNumber),
        &PipelineConfig::min_books_per_user);
  track(add_env_option(run_cmd, "--min-readers-per-book", cfg.min_readers_per_book,
             "Drop books with fewer readers")
            ->check(CLI::NonNegativeNumber),
        &PipelineConfig::min_readers_per_book);
  track(add_env_option(run_cmd, "--subject-min-count", cfg.subject_min_count,
             "Drop subjects on fewer books")
            ->check(CLI::NonNegativeNumber),
        &PipelineConfig::subject_min_count);
  track(add_env_option(run_cmd, "--resolution", cfg.resolution,
             "Louvain resolution")
            ->check(CLI::PositiveNumber),
        &PipelineConfig::resolution);
  track(add_env_option(run_cmd, "--seed", cfg.seed, "Random seed"),
        &PipelineConfig::seed);
  track(add_env_option(run_cmd, "--top-n", cfg.top_n, "Representative books per community")
            ->check(CLI::PositiveNumber),
        &PipelineConfig::top_n);
  track(run_cmd->add_flag("--sub-communities", cfg.sub_communities,
                          "Also split every community")
            ->envname("GENREGRAPH_SUB_COMMUNITIES"),
        &PipelineConfig::sub_communities);
  track(run_cmd->add_flag("--dedupe", cfg.dedupe,
                          "Keep the highest of repeated ratings")
            ->envname("GENREGRAPH_DEDUPE"),
        &PipelineConfig::dedupe);
  add_env_option(run_cmd, "--output-dir", output_dir, "Output directory")->required();
  add_env_option(run_cmd, "--threads", cfg.threads, "Projection workers")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--manifest", manifest_path,
                      "Replay the settings of an earlier run's manifest.json")
      ->check(CLI::ExistingFile);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted fixture");
  SynthConfig synth;
  std::string synth_dir;
  add_env_option(synth_cmd, "--k", synth.k, "Planted communities");
  add_env_option(synth_cmd, "--books-per-community", synth.books_per_community, "");
  add_env_option(synth_cmd, "--users-per-community", synth.users_per_community, "");
  add_env_option(synth_cmd, "--reads-per-user", synth.reads_per_user, "");
  add_env_option(synth_cmd, "--p-in", synth.p_in, "Chance a read stays home");
  add_env_option(synth_cmd, "--p-enjoy-in", synth.p_enjoy_in, "");
  add_env_option(synth_cmd, "--p-enjoy-out", synth.p_enjoy_out, "");
  add_env_option(synth_cmd, "--subjects-per-community", synth.subjects_per_community,
       "");
  add_env_option(synth_cmd, "--seed", synth.seed, "Random seed");
  add_env_option(synth_cmd, "--output-dir", synth_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*validate_cmd) return run_validate(v_ratings, v_subjects, v_dedupe);
  if (*synth_cmd) return run_synth(synth, synth_dir);

  cfg.output_dir = output_dir;
  if (!manifest_path.empty()) {
    PipelineConfig replay;
    try {
      std::ifstream in(manifest_path);
      apply_manifest(nlohmann::json::parse(in), replay);
    } catch (const std::exception& e) {
      spdlog::error("{}: {}", manifest_path, e.what());
      return kExitParse;
    }
    for (const auto& [opt, copy] : overrides) {
      if (opt->count() > 0) copy(replay);
    }
    replay.output_dir = cfg.output_dir;
    replay.threads = cfg.threads;
    cfg = replay;
  }
  return run_pipeline(cfg);
}
