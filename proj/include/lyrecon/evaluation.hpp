#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyrecon/bow_corpus.hpp"
#include "lyrecon/text_analysis.hpp"

namespace lyrecon {

class EvaluationError : public std::runtime_error {
 public:
  enum class Code { EmptyCorpus, InsufficientOverlap, DegenerateRanks, MalformedStats };

  EvaluationError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// The nine corpus-level rows of the comparison table.
struct CorpusStats {
  std::uint64_t lyric_set_count = 0;
  double avg_words_per_set = 0.0;
  double avg_lines_per_set = 0.0;
  double avg_sections_per_set = 0.0;
  std::uint64_t unique_unigrams = 0;
  std::uint64_t unique_bigrams = 0;
  std::uint64_t unique_trigrams = 0;
  double abstract_ratio = 0.0;  // percent
  double concrete_ratio = 0.0;  // percent

  bool operator==(const CorpusStats&) const = default;
};

// N-grams never span lines; ratios pool all tokens of the corpus.
CorpusStats corpus_stats(std::span<const LyricDoc> docs, const Lexicon& abstract_lexicon,
                         const Lexicon& concrete_lexicon);

struct StatRow {
  std::string key;    // machine-readable name
  std::string label;  // table caption
  double value = 0.0;
  bool integral = false;
};

// Rows in table order.
std::vector<StatRow> stat_rows(const CorpusStats& stats);

struct ComparisonRow {
  std::string key;
  std::string label;
  bool integral = false;
  double left = 0.0;
  double right = 0.0;
  double abs_delta = 0.0;              // left - right
  std::optional<double> rel_delta;     // (left - right) / right; empty when right == 0
};

struct ComparisonReport {
  CorpusStats left;
  CorpusStats right;
  std::vector<ComparisonRow> rows;
};

ComparisonReport compare(const CorpusStats& left, const CorpusStats& right);

// Aligned text table: Item | <left_label> | <right_label> | Delta | Rel. Delta.
std::string render_report_text(const ComparisonReport& report, const std::string& left_label,
                               const std::string& right_label);
// Header `row\tleft\tright\tabs_delta\trel_delta`, one line per statistic.
std::string render_report_tsv(const ComparisonReport& report);

// Single-corpus renderings.
std::string render_stats_text(const CorpusStats& stats, const std::string& label);
std::string render_stats_tsv(const CorpusStats& stats);
CorpusStats parse_stats_tsv(std::istream& in);

// Fraction of the track's words matched by a doc token, either verbatim or
// through stem().
double bow_coverage(const LyricDoc& doc, const TrackBow& track, const VocabTable& vocab);

// Spearman rank correlation (average ranks for ties) between BoW counts and
// doc counts over the words present in both.
double frequency_fidelity(const LyricDoc& doc, const TrackBow& track, const VocabTable& vocab);

// Pearson correlation of average ranks. Exposed for testing.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace lyrecon
