#include "lyrecon/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "strings.hpp"

namespace lyrecon {

namespace {

struct RowSpec {
  const char* key;
  const char* label;
  bool integral;
};

constexpr RowSpec kRows[] = {
    {"lyric_set_count", "Total Count of Lyrics Sets", true},
    {"avg_words_per_set", "Average Word Count per Set", false},
    {"avg_lines_per_set", "Average Line Count per Set", false},
    {"avg_sections_per_set", "Average Section Count per Set", false},
    {"unique_unigrams", "Total Count of Unique Unigrams", true},
    {"unique_bigrams", "Total Count of Unique Bigrams", true},
    {"unique_trigrams", "Total Count of Unique Trigrams", true},
    {"abstract_ratio", "Abstract Words Ratio", false},
    {"concrete_ratio", "Concrete Words Ratio", false},
};

std::vector<double> row_values(const CorpusStats& s) {
  return {static_cast<double>(s.lyric_set_count),
          s.avg_words_per_set,
          s.avg_lines_per_set,
          s.avg_sections_per_set,
          static_cast<double>(s.unique_unigrams),
          static_cast<double>(s.unique_bigrams),
          static_cast<double>(s.unique_trigrams),
          s.abstract_ratio,
          s.concrete_ratio};
}

std::string printf_string(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

std::string with_thousands(std::uint64_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string display_value(double value, bool integral) {
  if (integral) {
    const bool negative = value < 0;
    auto text = with_thousands(static_cast<std::uint64_t>(std::llround(std::fabs(value))));
    return negative ? "-" + text : text;
  }
  return printf_string("%.2f", value);
}

std::string display_delta(double value, bool integral) {
  auto text = display_value(value, integral);
  return value > 0 ? "+" + text : text;
}

std::string tsv_value(double value, bool integral) {
  if (integral) return std::to_string(std::llround(value));
  return printf_string("%.6f", value);
}

std::string render_table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    widths.resize(std::max(widths.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const auto& cell = cells[r][c];
      const auto pad = std::string(widths[c] - cell.size(), ' ');
      if (c > 0) line += "  ";
      // Item column left-aligned, numbers right-aligned.
      line += c == 0 ? cell + pad : pad + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

// Credits each token to at most one of the track's words: a verbatim match
// first, otherwise its stem.
std::unordered_map<std::string, std::uint64_t> matched_counts(const LyricDoc& doc,
                                                              const TrackBow& track,
                                                              const VocabTable& vocab) {
  std::unordered_set<std::string> words;
  for (const auto& [index, count] : track.counts) words.insert(vocab.word(index));
  std::unordered_map<std::string, std::uint64_t> counts;
  std::unordered_map<std::string, std::string> stem_cache;
  for (const auto& line : doc.tokens) {
    for (const auto& token : line) {
      if (words.count(token)) {
        ++counts[token];
        continue;
      }
      auto it = stem_cache.find(token);
      if (it == stem_cache.end()) it = stem_cache.emplace(token, stem(token)).first;
      if (words.count(it->second)) ++counts[it->second];
    }
  }
  return counts;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

CorpusStats corpus_stats(std::span<const LyricDoc> docs, const Lexicon& abstract_lexicon,
                         const Lexicon& concrete_lexicon) {
  if (docs.empty()) throw EvaluationError(EvaluationError::Code::EmptyCorpus, "EmptyCorpus: no lyric sets");

  std::uint64_t words = 0;
  std::uint64_t lines = 0;
  std::uint64_t sections = 0;
  std::uint64_t abstract_hits = 0;
  std::uint64_t concrete_hits = 0;
  std::unordered_set<std::string> unigrams;
  std::unordered_set<std::string> bigrams;
  std::unordered_set<std::string> trigrams;

  for (const auto& doc : docs) {
    lines += doc.lines.size();
    sections += doc.sections.size();
    for (const auto& line : doc.tokens) {
      words += line.size();
      for (const auto& token : line) {
        unigrams.insert(token);
        abstract_hits += abstract_lexicon.contains(token) ? 1 : 0;
        concrete_hits += concrete_lexicon.contains(token) ? 1 : 0;
      }
      for (auto& key : ngram_keys(line, 2)) bigrams.insert(std::move(key));
      for (auto& key : ngram_keys(line, 3)) trigrams.insert(std::move(key));
    }
  }

  const auto sets = static_cast<double>(docs.size());
  CorpusStats stats;
  stats.lyric_set_count = docs.size();
  stats.avg_words_per_set = static_cast<double>(words) / sets;
  stats.avg_lines_per_set = static_cast<double>(lines) / sets;
  stats.avg_sections_per_set = static_cast<double>(sections) / sets;
  stats.unique_unigrams = unigrams.size();
  stats.unique_bigrams = bigrams.size();
  stats.unique_trigrams = trigrams.size();
  if (words > 0) {
    stats.abstract_ratio = 100.0 * static_cast<double>(abstract_hits) / static_cast<double>(words);
    stats.concrete_ratio = 100.0 * static_cast<double>(concrete_hits) / static_cast<double>(words);
  }
  return stats;
}

std::vector<StatRow> stat_rows(const CorpusStats& stats) {
  const auto values = row_values(stats);
  std::vector<StatRow> rows;
  for (std::size_t i = 0; i < std::size(kRows); ++i) {
    rows.push_back({kRows[i].key, kRows[i].label, values[i], kRows[i].integral});
  }
  return rows;
}

ComparisonReport compare(const CorpusStats& left, const CorpusStats& right) {
  ComparisonReport report{left, right, {}};
  const auto lv = row_values(left);
  const auto rv = row_values(right);
  for (std::size_t i = 0; i < std::size(kRows); ++i) {
    ComparisonRow row{kRows[i].key, kRows[i].label, kRows[i].integral, lv[i], rv[i], lv[i] - rv[i], {}};
    if (rv[i] != 0.0) row.rel_delta = row.abs_delta / rv[i];
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_report_text(const ComparisonReport& report, const std::string& left_label,
                               const std::string& right_label) {
  std::vector<std::vector<std::string>> cells{{"Item", left_label, right_label, "Delta", "Rel. Delta"}};
  for (const auto& row : report.rows) {
    cells.push_back({row.label, display_value(row.left, row.integral),
                     display_value(row.right, row.integral), display_delta(row.abs_delta, row.integral),
                     row.rel_delta ? printf_string("%+.2f%%", 100.0 * *row.rel_delta) : "n/a"});
  }
  return render_table(cells);
}

std::string render_report_tsv(const ComparisonReport& report) {
  std::string out = "row\tleft\tright\tabs_delta\trel_delta\n";
  for (const auto& row : report.rows) {
    out += row.key + "\t" + tsv_value(row.left, row.integral) + "\t" +
           tsv_value(row.right, row.integral) + "\t" + tsv_value(row.abs_delta, row.integral) + "\t" +
           (row.rel_delta ? printf_string("%.6f", *row.rel_delta) : "n/a") + "\n";
  }
  return out;
}

std::string render_stats_text(const CorpusStats& stats, const std::string& label) {
  std::vector<std::vector<std::string>> cells{{"Item", label}};
  for (const auto& row : stat_rows(stats)) cells.push_back({row.label, display_value(row.value, row.integral)});
  return render_table(cells);
}

std::string render_stats_tsv(const CorpusStats& stats) {
  std::string out = "row\tvalue\n";
  for (const auto& row : stat_rows(stats)) out += row.key + "\t" + tsv_value(row.value, row.integral) + "\n";
  return out;
}

CorpusStats parse_stats_tsv(std::istream& in) {
  using Code = EvaluationError::Code;
  std::unordered_map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line_no == 1 || detail::trim(line).empty()) continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 2) {
      throw EvaluationError(Code::MalformedStats, "stats line " + std::to_string(line_no) + ": expected row<TAB>value");
    }
    values[std::string(fields[0])] = std::string(fields[1]);
  }
  auto get = [&](const char* key) {
    auto it = values.find(key);
    if (it == values.end()) throw EvaluationError(Code::MalformedStats, std::string("stats file lacks row ") + key);
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::logic_error&) {
      throw EvaluationError(Code::MalformedStats, std::string("bad value for ") + key);
    }
  };
  CorpusStats s;
  s.lyric_set_count = static_cast<std::uint64_t>(get("lyric_set_count"));
  s.avg_words_per_set = get("avg_words_per_set");
  s.avg_lines_per_set = get("avg_lines_per_set");
  s.avg_sections_per_set = get("avg_sections_per_set");
  s.unique_unigrams = static_cast<std::uint64_t>(get("unique_unigrams"));
  s.unique_bigrams = static_cast<std::uint64_t>(get("unique_bigrams"));
  s.unique_trigrams = static_cast<std::uint64_t>(get("unique_trigrams"));
  s.abstract_ratio = get("abstract_ratio");
  s.concrete_ratio = get("concrete_ratio");
  return s;
}

double bow_coverage(const LyricDoc& doc, const TrackBow& track, const VocabTable& vocab) {
  if (track.counts.empty()) return 0.0;
  const auto counts = matched_counts(doc, track, vocab);
  return static_cast<double>(counts.size()) / static_cast<double>(track.counts.size());
}

double spearman(std::span<const double> x, std::span<const double> y) {
  using Code = EvaluationError::Code;
  if (x.size() != y.size() || x.size() < 2) {
    throw EvaluationError(Code::InsufficientOverlap, "InsufficientOverlap: need at least two paired values");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw EvaluationError(Code::DegenerateRanks, "DegenerateRanks: all values tied on one side");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double frequency_fidelity(const LyricDoc& doc, const TrackBow& track, const VocabTable& vocab) {
  const auto counts = matched_counts(doc, track, vocab);
  std::vector<double> bow_side;
  std::vector<double> doc_side;
  for (const auto& [index, count] : track.counts) {
    auto it = counts.find(vocab.word(index));
    if (it == counts.end()) continue;
    bow_side.push_back(static_cast<double>(count));
    doc_side.push_back(static_cast<double>(it->second));
  }
  if (bow_side.size() < 2) {
    throw EvaluationError(EvaluationError::Code::InsufficientOverlap,
                          "InsufficientOverlap: fewer than two vocabulary words appear in the lyrics");
  }
  return spearman(bow_side, doc_side);
}

}  // namespace lyrecon
