// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.
//
//   acceptance <path-to-genregraph-cli>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "csv_reader.hpp"
#include "genregraph/centrality.hpp"
#include "genregraph/community.hpp"
#include "genregraph/error.hpp"
#include "genregraph/ingest.hpp"
#include "genregraph/pca.hpp"
#include "genregraph/pipeline.hpp"
#include "genregraph/project.hpp"
#include "genregraph/subjects.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace genregraph;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("genregraph_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_corpus(const SyntheticCorpus& corpus, const fs::path& dir) {
  std::ofstream r(dir / "ratings.tsv", std::ios::binary);
  write_ratings(corpus.ratings, r);
  std::ofstream s(dir / "subjects.tsv", std::ios::binary);
  write_subjects(corpus.subjects, s);
}

// Partition read back from a pipeline membership.csv.
Partition read_membership(const fs::path& path) {
  const auto rows = testing_csv::read_csv(path);
  std::vector<std::string> nodes;
  std::vector<std::int64_t> labels;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    nodes.push_back(rows[i][0]);
    labels.push_back(std::stoll(rows[i][1]));
  }
  return Partition::from_labels(nodes, labels);
}

Partition restrict(const Partition& planted, const Partition& detected) {
  std::vector<std::int64_t> labels;
  for (const auto& id : detected.node_ids()) {
    labels.push_back(*planted.community_of(id));
  }
  return Partition::from_labels(detected.node_ids(), labels);
}

SynthConfig planted_config() {
  SynthConfig sc;
  sc.k = 4;
  sc.books_per_community = 50;
  sc.users_per_community = 500;
  sc.reads_per_user = 15;
  sc.p_in = 0.9;
  sc.p_enjoy_in = 0.8;
  sc.p_enjoy_out = 0.3;
  sc.seed = 0;
  return sc;
}

Outcome jaccard_oracle() {
  oracle::Rng rng(1001);
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t edges = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ratings = oracle::random_ratings(rng, 50, 40, 0.12);
    const auto expected = oracle::jaccard(ratings);
    const auto g = project_jaccard(oracle::to_graph(ratings));
    if (g.num_edges() != expected.size()) {
      return {false, fmt::format("trial {}: {} edges, oracle {}", trial,
                                 g.num_edges(), expected.size())};
    }
    for (const auto& e : g.edges()) {
      const auto key = std::make_pair(g.node_ids()[e.source],
                                      g.node_ids()[e.target]);
      const auto it = expected.find(key);
      if (it == expected.end()) {
        return {false, fmt::format("trial {}: unexpected edge", trial)};
      }
      worst = std::max(worst, std::abs(it->second - e.weight));
    }
    edges += g.num_edges();
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-12 && elapsed < 5.0,
          fmt::format("200 graphs, {} edges, max error {:.2e}, {:.2f} s", edges,
                      worst, elapsed)};
}

Outcome modularity_oracle() {
  oracle::Rng rng(1002);
  double worst = 0.0;
  bool whole_zero = true;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_graph(rng, oracle::uniform_int(rng, 2, 12),
                                        0.4, true);
    std::vector<std::int64_t> labels;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      labels.push_back(oracle::uniform_int(rng, 0, 3));
    }
    const auto p = Partition::from_labels(g.node_ids(), labels);
    const double gamma = trial % 2 ? 1.0 : oracle::uniform(rng, 0.3, 3.0);
    worst = std::max(
        worst, std::abs(modularity(g, p, gamma) -
                        oracle::modularity(oracle::adjacency(g),
                                           oracle::labels_of(p, g), gamma)));
    whole_zero = whole_zero && modularity(g, Partition::whole(g), 1.0) == 0.0;
  }
  return {worst <= 1e-12 && whole_zero,
          fmt::format("200 graphs, max error {:.2e}, whole-graph Q == 0: {}",
                      worst, whole_zero ? "yes" : "no")};
}

Outcome louvain_quality() {
  for (int size = 2; size <= 12; ++size) {
    const auto g = oracle::two_cliques(size);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      LouvainConfig cfg;
      cfg.seed = seed;
      const auto p = louvain(g, cfg);
      std::vector<std::int64_t> planted;
      for (int i = 0; i < 2 * size; ++i) planted.push_back(i / size);
      if (nmi(p, Partition::from_labels(g.node_ids(), planted)) != 1.0) {
        return {false, fmt::format("clique size {} seed {} not recovered",
                                   size, seed)};
      }
    }
  }
  for (int n = 2; n <= 8; ++n) {
    const auto g = oracle::complete_graph(n, 1.0);
    const double lo = modularity(g, Partition::singletons(g));
    const double hi = oracle::best_modularity(oracle::adjacency(g), 1.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      LouvainConfig cfg;
      cfg.seed = seed;
      const double q = modularity(g, louvain(g, cfg));
      if (q < lo - 1e-12 || q > hi + 1e-12) {
        return {false, fmt::format("K{} seed {}: Q {} outside [{}, {}]", n,
                                   seed, q, lo, hi)};
      }
    }
  }
  return {true,
          "two cliques of 2..12 recovered exactly; K2..K8 within "
          "[singletons, exhaustive max]"};
}

struct PlantedRun {
  double reader_nmi;
  double enjoyment_nmi;
  double reader_q;
  double enjoyment_q;
  double seconds;
  int exit_code;
};

PlantedRun run_planted(const SynthConfig& sc, const std::string& name) {
  const auto dir = scratch(name);
  const auto corpus = generate_synthetic(sc);
  write_corpus(corpus, dir);
  PipelineConfig cfg;
  cfg.ratings = (dir / "ratings.tsv").string();
  cfg.subjects = (dir / "subjects.tsv").string();
  cfg.output_dir = dir / "out";
  cfg.sub_communities = true;
  const auto start = Clock::now();
  const int code = run_pipeline(cfg);
  const double elapsed = seconds_since(start);
  PlantedRun run{0.0, 0.0, 0.0, 0.0, elapsed, code};
  if (code == kExitOk) {
    for (const auto& [mode, slot, q] :
         {std::tuple{"reader", &run.reader_nmi, &run.reader_q},
          std::tuple{"enjoyment", &run.enjoyment_nmi, &run.enjoyment_q}}) {
      const auto detected =
          read_membership(cfg.output_dir / mode / "membership.csv");
      *slot = nmi(detected, restrict(corpus.planted, detected));
      for (const auto& row : testing_csv::read_csv(
               cfg.output_dir / mode / "network_summary.csv")) {
        if (row[0] == "modularity") *q = std::stod(row[1]);
      }
    }
  }
  fs::remove_all(dir);
  return run;
}

Outcome planted_recovery() {
  const auto run = run_planted(planted_config(), "planted");
  return {run.exit_code == kExitOk && run.enjoyment_nmi >= 0.9 &&
              run.seconds < 30.0,
          fmt::format("enjoyment NMI {:.4f} (reader {:.4f}), full pipeline "
                      "{:.2f} s, exit {}",
                      run.enjoyment_nmi, run.reader_nmi, run.seconds,
                      run.exit_code)};
}

Outcome reader_vs_enjoyment() {
  auto sc = planted_config();
  sc.p_enjoy_out = 0.05;
  const auto run = run_planted(sc, "distinction");
  return {run.exit_code == kExitOk && run.enjoyment_nmi > run.reader_nmi,
          fmt::format("enjoyment NMI {:.4f} vs reader NMI {:.4f} "
                      "(modularity {:.4f} vs {:.4f})",
                      run.enjoyment_nmi, run.reader_nmi, run.enjoyment_q,
                      run.reader_q)};
}

Outcome eigenvector_oracle() {
  oracle::Rng rng(1006);
  double worst = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::random_graph(rng, oracle::uniform_int(rng, 2, 20),
                                        0.25, true);
    const auto s = eigenvector_centrality(g);
    const Eigen::Map<const Eigen::VectorXd> v(
        s.values.data(), static_cast<Eigen::Index>(s.values.size()));
    const auto ref = oracle::dominant_eigenvector(oracle::adjacency(g));
    worst = std::min(worst, v.dot(ref) / (v.norm() * ref.norm()));
  }
  const SimilarityGraph path({"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto s = eigenvector_centrality(path);
  const double ratio_error = std::abs(s.at("b") / s.at("a") - std::sqrt(2.0));
  return {worst >= 0.999999 && ratio_error <= 1e-9,
          fmt::format("100 graphs, min cosine {:.12f}, path ratio error {:.2e}",
                      worst, ratio_error)};
}

CommunitySubjectMatrix to_matrix(const Eigen::MatrixXd& x) {
  CommunitySubjectMatrix m;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    m.subjects.push_back(fmt::format("s{:03}", r));
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    m.communities.push_back(static_cast<CommunityId>(c));
    m.subject_bearing_books.push_back(1);
  }
  m.entries = Matrix(static_cast<std::size_t>(x.rows()),
                     static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) m.entries(r, c) = x(r, c);
  }
  return m;
}

Outcome pca_correctness() {
  oracle::Rng rng(1007);
  double recon = 0.0, ratio = 0.0, ortho = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(30, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = oracle::uniform(rng, 0, 1);
    const auto r = run_pca(to_matrix(x));
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const auto l = oracle::to_eigen(r.loadings);
    recon = std::max(recon, (oracle::to_eigen(r.scores) * l - centered)
                                .cwiseAbs()
                                .maxCoeff());
    const auto [values, vectors] = oracle::covariance_eigen(x);
    for (std::size_t d = 0; d < r.num_dims(); ++d) {
      ratio = std::max(ratio, std::abs(r.explained_variance_ratio[d] -
                                       values(d) / values.sum()));
    }
    ortho = std::max(ortho, (l * l.transpose() -
                             Eigen::MatrixXd::Identity(l.rows(), l.rows()))
                                .cwiseAbs()
                                .maxCoeff());
  }
  Eigen::MatrixXd a(40, 2), b(2, 6), noise(40, 6);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = oracle::uniform(rng, 0, 1);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = oracle::uniform(rng, 0, 1);
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    noise(i) = oracle::uniform(rng, -1e-4, 1e-4);
  }
  const auto rank2 = run_pca(to_matrix(a * b + noise));
  const double top2 =
      rank2.explained_variance_ratio[0] + rank2.explained_variance_ratio[1];
  return {recon <= 1e-8 && ratio <= 1e-9 && ortho <= 1e-9 && top2 >= 0.999,
          fmt::format("reconstruction {:.2e}, ratio error {:.2e}, "
                      "orthonormality {:.2e}, rank-2 top two {:.6f}",
                      recon, ratio, ortho, top2)};
}

Outcome filter_semantics() {
  // Users: u_single reads one book, everyone else at least two.
  // Books: b_k has k readers for k = 5..14.
  RatingGraph::Builder b;
  for (int k = 5; k <= 14; ++k) {
    for (int u = 0; u < k; ++u) {
      b.add_rating(fmt::format("u{:02}", u), fmt::format("b{:02}", k),
                   1 + (u + k) % 5);
    }
  }
  b.add_rating("u_single", "b14", 5);
  const auto g = std::move(b).build();

  // u13 and u_single each read only b14.
  std::set<std::string> single;
  for (Index u = 0; u < g.num_users(); ++u) {
    if (g.user_degree(u) == 1) single.insert(g.user_ids()[u]);
  }
  const auto users = filter_users(g, 2);
  std::set<std::string> dropped_users;
  for (const auto& id : g.user_ids()) {
    if (!users.find_user(id)) dropped_users.insert(id);
  }
  const bool users_ok =
      dropped_users == single &&
      single == std::set<std::string>{"u13", "u_single"};

  const auto books = filter_books(users, 10);
  std::set<std::string> kept_books(books.book_ids().begin(),
                                   books.book_ids().end());
  std::set<std::string> expected_books;
  for (int k = 10; k <= 14; ++k) expected_books.insert(fmt::format("b{:02}", k));
  const bool books_ok = kept_books == expected_books;

  const auto rated = filter_by_rating(g, 4);
  std::size_t expected_edges = 0;
  for (const auto& e : g.edges()) expected_edges += e.stars >= 4;
  double sum = 0.0;
  bool stars_ok = rated.num_edges() == expected_edges;
  for (const auto& e : rated.edges()) {
    stars_ok = stars_ok && (e.stars == 4 || e.stars == 5);
    sum += e.stars;
  }
  const double mean = sum / static_cast<double>(rated.num_edges());
  stars_ok = stars_ok && mean >= 4.0 && mean <= 5.0;

  std::map<std::string, std::set<std::string>> subjects;
  std::vector<std::string> scope;
  for (int i = 0; i < 30; ++i) {
    const auto book = fmt::format("s{:02}", i);
    scope.push_back(book);
    if (i < 12) subjects[book].insert("twelve");
    if (i < 13) subjects[book].insert("thirteen");
    subjects[book].insert("thirty");
  }
  const auto pruned = prune_subjects(SubjectCatalog(subjects), scope, 13);
  const bool subjects_ok = pruned.all_subjects() ==
                           std::set<std::string>{"thirteen", "thirty"};

  return {users_ok && books_ok && stars_ok && subjects_ok,
          fmt::format("single-book users {}, sub-10 books {}, threshold 4 "
                      "{} (mean {:.3f}), 12-count subjects {}",
                      users_ok ? "ok" : "wrong", books_ok ? "ok" : "wrong",
                      stars_ok ? "ok" : "wrong", mean,
                      subjects_ok ? "ok" : "wrong")};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    out[fs::relative(entry.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const auto dir = scratch("determinism");
  auto sc = planted_config();
  sc.users_per_community = 200;
  write_corpus(generate_synthetic(sc), dir);
  const auto run = [&](const std::string& out, int threads) {
    const auto cmd = fmt::format(
        "\"{}\" --log-level off run --ratings \"{}\" --subjects \"{}\" "
        "--sub-communities --threads {} --output-dir \"{}\"",
        cli, (dir / "ratings.tsv").string(), (dir / "subjects.tsv").string(),
        threads, (dir / out).string());
    return std::system(cmd.c_str());
  };
  const int a = run("one", 1);
  const int b = run("two", 1);
  const int c = run("eight", 8);
  if (a != 0 || b != 0 || c != 0) {
    fs::remove_all(dir);
    return {false, fmt::format("run exit statuses {} {} {}", a, b, c)};
  }
  const auto one = snapshot(dir / "one");
  const bool same = one == snapshot(dir / "two");
  const bool threads_same = one == snapshot(dir / "eight");
  fs::remove_all(dir);
  return {same && threads_same && one.size() > 1,
          fmt::format("{} files; repeat run identical: {}; threads 1 vs 8 "
                      "identical: {}",
                      one.size(), same ? "yes" : "no",
                      threads_same ? "yes" : "no")};
}

Outcome enrichment_sanity() {
  const auto dir = scratch("enrichment");
  const auto corpus = generate_synthetic(planted_config());
  // One exclusive label per planted community.
  std::map<std::string, std::set<std::string>> labels;
  const auto& planted = corpus.planted;
  for (std::size_t i = 0; i < planted.num_nodes(); ++i) {
    labels[planted.node_ids()[i]] = {
        fmt::format("label_{}", planted.assignment()[i])};
  }
  {
    std::ofstream r(dir / "ratings.tsv", std::ios::binary);
    write_ratings(corpus.ratings, r);
    std::ofstream s(dir / "subjects.tsv", std::ios::binary);
    write_subjects(SubjectCatalog(labels), s);
  }
  PipelineConfig cfg;
  cfg.ratings = (dir / "ratings.tsv").string();
  cfg.subjects = (dir / "subjects.tsv").string();
  cfg.mode = "enjoyment";
  cfg.output_dir = dir / "out";
  const int code = run_pipeline(cfg);
  if (code != kExitOk) {
    fs::remove_all(dir);
    return {false, fmt::format("pipeline exit {}", code)};
  }
  const auto detected =
      read_membership(cfg.output_dir / "enjoyment" / "membership.csv");
  const auto rows =
      testing_csv::read_csv(cfg.output_dir / "enjoyment" / "enrichment.csv");
  fs::remove_all(dir);

  // Top-lift subject per detected community (rows are sorted by lift).
  std::map<std::string, std::string> top;
  for (std::size_t i = 1; i < rows.size(); ++i) top.try_emplace(rows[i][1], rows[i][0]);
  std::size_t matched = 0;
  for (CommunityId c = 0; c < detected.num_communities(); ++c) {
    std::map<CommunityId, std::size_t> votes;
    for (const auto& book : detected.members(c)) {
      ++votes[*planted.community_of(book)];
    }
    const auto majority =
        std::max_element(votes.begin(), votes.end(), [](auto& x, auto& y) {
          return x.second < y.second;
        })->first;
    const auto it = top.find(std::to_string(c));
    matched += it != top.end() &&
               it->second == fmt::format("label_{}", majority);
  }
  return {matched == detected.num_communities(),
          fmt::format("{}/{} communities have their planted label on top",
                      matched, detected.num_communities())};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"jaccard projection matches set oracle", jaccard_oracle},
      {"modularity matches double-sum oracle", modularity_oracle},
      {"louvain quality on cliques and complete graphs", louvain_quality},
      {"planted recovery on enjoyment network", planted_recovery},
      {"enjoyment beats reader on planted fixture", reader_vs_enjoyment},
      {"eigenvector centrality matches dense solver", eigenvector_oracle},
      {"pca correctness", pca_correctness},
      {"filter semantics", filter_semantics},
      {"byte-identical outputs", [&] { return determinism(cli); }},
      {"enrichment top lift is planted label", enrichment_sanity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += !out.pass;
    std::cout << fmt::format("[{}] {:2} {}: {}", out.pass ? "PASS" : "FAIL",
                             i + 1, criteria[i].first, out.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures,
                           criteria.size())
            << std::endl;
  return failures == 0 ? 0 : 1;
}
