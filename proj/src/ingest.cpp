#include "genregraph/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "genregraph/error.hpp"
#include "genregraph/random.hpp"

namespace genregraph {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

// Calls fn(line, line_number) for every data line.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(std::string_view(line), number);
  }
  if (in.bad()) throw IoError("read failure");
}

int parse_stars(std::string_view field, std::size_t line) {
  field = trim(field);
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(fmt::format("rating '{}' is not an integer", field),
                     line);
  }
  if (value < kMinStars || value > kMaxStars) {
    throw ParseError(fmt::format("rating {} outside [{}, {}]", value,
                                 kMinStars, kMaxStars),
                     line);
  }
  return value;
}

int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

}  // namespace

RatingGraph parse_ratings(std::istream& in, const ParseOptions& options) {
  RatingGraph::Builder builder(options.dedupe
                                   ? RatingGraph::DuplicatePolicy::kKeepMax
                                   : RatingGraph::DuplicatePolicy::kError);
  for_each_record(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError(
          fmt::format("expected 3 tab-separated fields, found {}",
                      fields.size()),
          number);
    }
    const auto user = fields[0];
    const auto book = fields[1];
    if (user.empty() || book.empty()) {
      throw ParseError("empty user or book id", number);
    }
    const int stars = parse_stars(fields[2], number);
    try {
      builder.add_rating(user, book, stars);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), number);
    }
  });
  return std::move(builder).build();
}

SubjectCatalog parse_subjects(std::istream& in) {
  std::map<std::string, SubjectCatalog::Subjects> subjects;
  for_each_record(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(
          fmt::format("expected 2 tab-separated fields, found {}",
                      fields.size()),
          number);
    }
    const auto subject = trim(fields[1]);
    if (fields[0].empty() || subject.empty()) {
      throw ParseError("empty book id or subject", number);
    }
    subjects[std::string(fields[0])].emplace(subject);
  });
  return SubjectCatalog(std::move(subjects));
}

void write_ratings(const RatingGraph& g, std::ostream& out) {
  for (const auto& e : g.edges()) {
    out << g.user_ids()[e.user] << '\t' << g.book_ids()[e.book] << '\t'
        << e.stars << '\n';
  }
  if (!out) throw IoError("failed writing ratings");
}

void write_subjects(const SubjectCatalog& catalog, std::ostream& out) {
  for (const auto& [book, subjects] : catalog.entries()) {
    for (const auto& s : subjects) out << book << '\t' << s << '\n';
  }
  if (!out) throw IoError("failed writing subjects");
}

void validate(const SynthConfig& cfg) {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(cfg.p_in) || !in_unit(cfg.p_enjoy_in) ||
      !in_unit(cfg.p_enjoy_out)) {
    throw ConfigError("synthetic probabilities must lie in [0, 1]");
  }
  if (cfg.k < 1 || cfg.books_per_community < 1 ||
      cfg.users_per_community < 1 || cfg.reads_per_user < 1 ||
      cfg.subjects_per_community < 1) {
    throw ConfigError("synthetic counts must be >= 1");
  }
  const long long total_books =
      static_cast<long long>(cfg.k) * cfg.books_per_community;
  if (cfg.reads_per_user > total_books) {
    throw ConfigError(fmt::format(
        "reads_per_user ({}) exceeds the {} books in the corpus",
        cfg.reads_per_user, total_books));
  }
}

SyntheticCorpus generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const auto k = static_cast<std::size_t>(cfg.k);
  const auto per = static_cast<std::size_t>(cfg.books_per_community);
  const int cw = digits(cfg.k - 1);
  const int bw = digits(cfg.books_per_community - 1);
  const int uw = digits(cfg.users_per_community - 1);
  const int sw = digits(cfg.subjects_per_community - 1);

  RatingGraph::Builder builder;
  std::vector<Index> book_index(k * per);
  std::vector<std::string> book_names(k * per);
  std::map<std::string, SubjectCatalog::Subjects> subjects;
  for (std::size_t c = 0; c < k; ++c) {
    SubjectCatalog::Subjects labels;
    for (int s = 0; s < cfg.subjects_per_community; ++s) {
      labels.insert(fmt::format("c{:0{}}_s{:0{}}", c, cw, s, sw));
    }
    for (std::size_t b = 0; b < per; ++b) {
      auto name = fmt::format("c{:0{}}_b{:0{}}", c, cw, b, bw);
      book_index[c * per + b] = builder.add_book(name);
      subjects.emplace(name, labels);
      book_names[c * per + b] = std::move(name);
    }
  }

  // Global book slot g belongs to community g / per.
  std::vector<char> taken(k * per, 0);
  std::vector<std::size_t> drawn;
  for (std::size_t c = 0; c < k; ++c) {
    for (int u = 0; u < cfg.users_per_community; ++u) {
      const Index user = builder.add_user(
          fmt::format("u{:0{}}_{:0{}}", c, cw, u, uw));
      std::size_t home_left = per;
      std::size_t away_left = (k - 1) * per;
      drawn.clear();
      for (int r = 0; r < cfg.reads_per_user; ++r) {
        bool home = k == 1 || bernoulli(rng, cfg.p_in);
        if (home && home_left == 0) home = false;
        if (!home && away_left == 0) home = true;
        std::size_t slot;
        do {
          if (home) {
            slot = c * per + uniform_below(rng, per);
          } else {
            slot = uniform_below(rng, (k - 1) * per);
            if (slot >= c * per) slot += per;
          }
        } while (taken[slot]);
        taken[slot] = 1;
        drawn.push_back(slot);
        --(home ? home_left : away_left);
        const double p_enjoy = home ? cfg.p_enjoy_in : cfg.p_enjoy_out;
        const int stars =
            bernoulli(rng, p_enjoy) ? kSyntheticEnjoy : kSyntheticDislike;
        builder.add_rating(user, book_index[slot], stars);
      }
      for (auto slot : drawn) taken[slot] = 0;
    }
  }

  SyntheticCorpus out;
  out.ratings = std::move(builder).build();
  out.subjects = SubjectCatalog(std::move(subjects));
  // Book names sort in (community, book) order thanks to zero padding.
  std::vector<std::int64_t> labels(k * per);
  for (std::size_t g = 0; g < k * per; ++g) {
    labels[g] = static_cast<std::int64_t>(g / per);
  }
  out.planted = Partition::from_labels(std::move(book_names), labels);
  return out;
}

}  // namespace genregraph
