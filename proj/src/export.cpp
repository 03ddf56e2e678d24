#include "genregraph/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "genregraph/error.hpp"
#include "genregraph/pca.hpp"

namespace genregraph {
namespace {

namespace fs = std::filesystem;

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters other than tab, LF and CR are not allowed in
        // XML 1.0 at all.
        if (static_cast<unsigned char>(ch) < 0x20 && ch != '\t' &&
            ch != '\n' && ch != '\r') {
          out += "\xEF\xBF\xBD";
        } else {
          out += ch;
        }
    }
  }
  return out;
}

// Per-node score lookup aligned with the graph's index order.
std::vector<double> aligned_scores(const SimilarityGraph& g,
                                   const CentralityScores& s) {
  if (s.nodes.size() != s.values.size()) {
    throw InvalidArgument("score set has mismatched node and value counts");
  }
  std::vector<double> out(g.num_nodes());
  std::vector<char> seen(g.num_nodes(), 0);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto idx = g.find(s.nodes[i]);
    if (!idx) {
      throw InvalidArgument(fmt::format("{} score for unknown node '{}'",
                                        to_string(s.measure), s.nodes[i]));
    }
    out[*idx] = s.values[i];
    seen[*idx] = 1;
  }
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (!seen[i]) {
      throw InvalidArgument(fmt::format("{} scores miss node '{}'",
                                        to_string(s.measure),
                                        g.node_ids()[i]));
    }
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing",
                                      path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

// Writes a CSV file through `fill`, returning its path.
template <typename Fill>
fs::path write_csv(const fs::path& path,
                   std::initializer_list<std::string_view> header, Fill fill) {
  auto out = open_output(path);
  std::vector<std::string> head(header.begin(), header.end());
  write_csv_row(out, head);
  fill(out);
  finish(out, path);
  return path;
}

void row(std::ostream& out, std::initializer_list<std::string> fields) {
  write_csv_row(out, std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace

std::string format_real(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{:.9g}", value);
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

void write_gexf(const SimilarityGraph& g, const Partition& p,
                std::span<const CentralityScores> scores, std::ostream& out) {
  const auto communities = p.labels_for(g);
  std::vector<std::vector<double>> values;
  for (const auto& s : scores) values.push_back(aligned_scores(g, s));

  std::vector<Index> order(g.num_nodes());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return g.node_ids()[a] < g.node_ids()[b];
  });

  struct NamedEdge {
    const std::string* source;
    const std::string* target;
    double weight;
  };
  std::vector<NamedEdge> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    const auto* a = &g.node_ids()[e.source];
    const auto* b = &g.node_ids()[e.target];
    if (*b < *a) std::swap(a, b);
    edges.push_back({a, b, e.weight});
  }
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return *x.source != *y.source ? *x.source < *y.source
                                  : *x.target < *y.target;
  });

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n"
      << "  <meta>\n"
      << "    <creator>genregraph</creator>\n"
      << "    <description>book similarity network</description>\n"
      << "  </meta>\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"0\" title=\"community\" type=\"integer\"/>\n";
  for (std::size_t s = 0; s < scores.size(); ++s) {
    out << "      <attribute id=\"" << s + 1 << "\" title=\""
        << to_string(scores[s].measure) << "\" type=\"float\"/>\n";
  }
  out << "    </attributes>\n";

  out << "    <nodes count=\"" << g.num_nodes() << "\">\n";
  for (const Index i : order) {
    const auto id = xml_escape(g.node_ids()[i]);
    out << "      <node id=\"" << id << "\" label=\"" << id << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"0\" value=\"" << communities[i]
        << "\"/>\n";
    for (std::size_t s = 0; s < values.size(); ++s) {
      out << "          <attvalue for=\"" << s + 1 << "\" value=\""
          << format_real(values[s][i]) << "\"/>\n";
    }
    out << "        </attvalues>\n"
        << "      </node>\n";
  }
  out << "    </nodes>\n";

  out << "    <edges count=\"" << edges.size() << "\">\n";
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out << "      <edge id=\"" << e << "\" source=\""
        << xml_escape(*edges[e].source) << "\" target=\""
        << xml_escape(*edges[e].target) << "\" weight=\""
        << format_real(edges[e].weight) << "\"/>\n";
  }
  out << "    </edges>\n"
      << "  </graph>\n"
      << "</gexf>\n";
  if (!out) throw IoError("failed writing GEXF");
}

std::vector<double> community_percentages(const Partition& p) {
  std::vector<double> out;
  const double n = static_cast<double>(p.num_nodes());
  for (const auto size : p.sizes()) {
    out.push_back(100.0 * static_cast<double>(size) / n);
  }
  return out;
}

ReportBundle write_reports(const fs::path& dir, const ReportInputs& in) {
  if (in.graph == nullptr || in.partition == nullptr) {
    throw InvalidArgument("write_reports needs a graph and a partition");
  }
  const auto& g = *in.graph;
  const auto& p = *in.partition;
  if (p.num_nodes() != g.num_nodes()) {
    throw InvalidArgument(fmt::format(
        "partition covers {} nodes but the network has {}", p.num_nodes(),
        g.num_nodes()));
  }
  const auto labels = p.labels_for(g);
  for (const auto& s : in.scores) aligned_scores(g, s);
  if (in.sub_communities) {
    for (const auto& [c, sub] : *in.sub_communities) {
      if (c >= p.num_communities() || sub.num_nodes() != p.sizes()[c]) {
        throw InvalidArgument(
            fmt::format("sub-partition of community {} does not match it", c));
      }
    }
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create {}: {}", dir.string(),
                              ec.message()));
  }

  ReportBundle bundle;
  bundle.network = dir / "network.gexf";
  {
    auto out = open_output(bundle.network);
    write_gexf(g, p, in.scores, out);
    finish(out, bundle.network);
  }

  bundle.network_summary = write_csv(
      dir / "network_summary.csv", {"metric", "value"},
      [&](std::ostream& out) {
        const double n = static_cast<double>(g.num_nodes());
        const double m = static_cast<double>(g.num_edges());
        row(out, {"books", std::to_string(g.num_nodes())});
        row(out, {"edges", std::to_string(g.num_edges())});
        row(out, {"density",
                  format_real(n > 1 ? 2.0 * m / (n * (n - 1)) : 0.0)});
        row(out, {"average_degree", format_real(n > 0 ? 2.0 * m / n : 0.0)});
        row(out, {"average_weighted_degree",
                  format_real(n > 0 ? 2.0 * g.total_weight() / n : 0.0)});
        row(out, {"communities", std::to_string(p.num_communities())});
        row(out, {"modularity", format_real(in.modularity)});
      });

  bundle.membership = write_csv(dir / "membership.csv", {"book", "community"},
                                [&](std::ostream& out) {
    std::vector<Index> order(g.num_nodes());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return g.node_ids()[a] < g.node_ids()[b];
    });
    for (const Index i : order) {
      row(out, {g.node_ids()[i], std::to_string(labels[i])});
    }
  });

  const auto percents = community_percentages(p);
  bundle.community_summary = write_csv(
      dir / "communities.csv", {"community", "size", "percent_of_network"},
      [&](std::ostream& out) {
        for (CommunityId c = 0; c < p.num_communities(); ++c) {
          row(out, {std::to_string(c), std::to_string(p.sizes()[c]),
                    format_real(percents[c])});
        }
      });

  bundle.top_books = write_csv(
      dir / "top_books.csv", {"community", "rank", "book", "measure", "score"},
      [&](std::ostream& out) {
        for (CommunityId c = 0; c < p.num_communities(); ++c) {
          for (const auto& s : in.scores) {
            CentralityScores restricted{s.measure, {}, {}};
            for (std::size_t i = 0; i < s.nodes.size(); ++i) {
              if (p.community_of(s.nodes[i]) == c) {
                restricted.nodes.push_back(s.nodes[i]);
                restricted.values.push_back(s.values[i]);
              }
            }
            const auto ranked = rank_scores(restricted, in.top_n);
            for (std::size_t r = 0; r < ranked.size(); ++r) {
              row(out, {std::to_string(c), std::to_string(r + 1),
                        ranked[r].book, std::string(to_string(s.measure)),
                        format_real(ranked[r].score)});
            }
          }
        }
      });

  if (in.enrichment) {
    bundle.enrichment = write_csv(
        dir / "enrichment.csv",
        {"subject", "community", "in_community_proportion",
         "global_proportion", "lift", "g_statistic"},
        [&](std::ostream& out) {
          for (const auto& r : in.enrichment->rows) {
            row(out, {r.subject, std::to_string(r.community),
                      format_real(r.in_community_proportion),
                      format_real(r.global_proportion), format_real(r.lift),
                      format_real(r.g_statistic)});
          }
        });
  }

  if (in.matrix) {
    const auto corr = column_correlations(*in.matrix);
    auto out = open_output(dir / "correlations.csv");
    std::vector<std::string> head{"community"};
    for (auto c : in.matrix->communities) head.push_back(std::to_string(c));
    write_csv_row(out, head);
    for (std::size_t i = 0; i < corr.rows(); ++i) {
      std::vector<std::string> fields{
          std::to_string(in.matrix->communities[i])};
      for (std::size_t j = 0; j < corr.cols(); ++j) {
        fields.push_back(format_real(corr(i, j)));
      }
      write_csv_row(out, fields);
    }
    finish(out, dir / "correlations.csv");
    bundle.correlations = dir / "correlations.csv";
  }

  if (in.pca) {
    const auto& r = *in.pca;
    bundle.pca_variance = write_csv(
        dir / "pca_variance.csv",
        {"dimension", "singular_value", "variance_ratio"},
        [&](std::ostream& out) {
          for (std::size_t d = 0; d < r.num_dims(); ++d) {
            row(out, {std::to_string(d + 1), format_real(r.singular_values[d]),
                      format_real(r.explained_variance_ratio[d])});
          }
        });
    bundle.pca_loadings = write_csv(
        dir / "pca_loadings.csv", {"dimension", "community", "loading"},
        [&](std::ostream& out) {
          for (std::size_t d = 0; d < r.num_dims(); ++d) {
            for (std::size_t c = 0; c < r.variables.size(); ++c) {
              row(out, {std::to_string(d + 1), std::to_string(r.variables[c]),
                        format_real(r.loadings(d, c))});
            }
          }
        });
    {
      const auto path = dir / "pca_scores.csv";
      auto out = open_output(path);
      std::vector<std::string> head{"subject"};
      for (std::size_t d = 0; d < r.num_dims(); ++d) {
        head.push_back(fmt::format("dim{}", d + 1));
      }
      write_csv_row(out, head);
      for (std::size_t i = 0; i < r.individuals.size(); ++i) {
        std::vector<std::string> fields{r.individuals[i]};
        for (std::size_t d = 0; d < r.num_dims(); ++d) {
          fields.push_back(format_real(r.scores(i, d)));
        }
        write_csv_row(out, fields);
      }
      finish(out, path);
      bundle.pca_scores = path;
    }
    bundle.pca_extremes = write_csv(
        dir / "pca_extremes.csv",
        {"dimension", "extreme", "rank", "subject", "score"},
        [&](std::ostream& out) {
          for (std::size_t d = 0; d < r.num_dims(); ++d) {
            const auto ex = extreme_subjects(r, d, in.extremes_n);
            for (std::size_t k = 0; k < ex.positive.size(); ++k) {
              row(out, {std::to_string(d + 1), "positive",
                        std::to_string(k + 1), ex.positive[k].subject,
                        format_real(ex.positive[k].score)});
            }
            for (std::size_t k = 0; k < ex.negative.size(); ++k) {
              row(out, {std::to_string(d + 1), "negative",
                        std::to_string(k + 1), ex.negative[k].subject,
                        format_real(ex.negative[k].score)});
            }
          }
        });
    if (r.num_dims() >= 2) {
      const auto plane = plane_coordinates(r);
      bundle.pca_plane = write_csv(
          dir / "pca_plane.csv", {"kind", "label", "maturity", "realism"},
          [&](std::ostream& out) {
            for (const auto& pt : plane.communities) {
              row(out, {"community", pt.label, format_real(pt.coords[0]),
                        format_real(pt.coords[1])});
            }
            for (const auto& pt : plane.subjects) {
              row(out, {"subject", pt.label, format_real(pt.coords[0]),
                        format_real(pt.coords[1])});
            }
          });
    }
  }

  if (in.sub_communities) {
    bundle.sub_communities = write_csv(
        dir / "sub_communities.csv",
        {"community", "sub_community", "book", "percent_of_community"},
        [&](std::ostream& out) {
          for (const auto& [c, sub] : *in.sub_communities) {
            const auto share = community_percentages(sub);
            for (CommunityId s = 0; s < sub.num_communities(); ++s) {
              for (const auto& book : sub.members(s)) {
                row(out, {std::to_string(c), std::to_string(s), book,
                          format_real(share[s])});
              }
            }
          }
        });
  }
  return bundle;
}

}  // namespace genregraph
