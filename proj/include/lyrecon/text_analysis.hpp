#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lyrecon {

// Lowercased whitespace-separated tokens; punctuation stays attached.
// Case folding is ASCII-only; other UTF-8 bytes pass through unchanged.
std::vector<std::string> tokenize(std::string_view text);

struct SectionRange {
  std::size_t first_line = 0;  // index into LyricDoc::lines
  std::size_t end_line = 0;    // one past the last line

  std::size_t size() const noexcept { return end_line - first_line; }
  bool operator==(const SectionRange&) const = default;
};

struct LyricDoc {
  std::string raw;
  std::vector<std::string> lines;                // non-blank lines in order
  std::vector<SectionRange> sections;            // blank-line-delimited blocks
  std::vector<std::vector<std::string>> tokens;  // per line

  std::size_t token_count() const noexcept;
};

LyricDoc segment(std::string text);

// Sliding window of n tokens over a single line's tokens.
std::vector<std::vector<std::string>> ngrams(const std::vector<std::string>& tokens, std::size_t n);

// Same windows, each joined with a single space. Tokens carry no whitespace,
// so the joined key identifies the n-gram.
std::vector<std::string> ngram_keys(const std::vector<std::string>& tokens, std::size_t n);

// Porter (1980) suffix stripper, steps 1a through 5b.
std::string stem(std::string_view word);

class LexiconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Lexicon {
 public:
  // Throws LexiconError when words is empty; words are lowercased.
  Lexicon(std::string name, std::unordered_set<std::string> words);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool contains(const std::string& token) const { return words_.count(token) != 0; }

 private:
  std::string name_;
  std::unordered_set<std::string> words_;
};

// One word per line, `#` comments and blank lines ignored.
Lexicon load_lexicon(std::istream& in, std::string name);
Lexicon load_lexicon_file(const std::string& path);

// Percentage of tokens that are lexicon members; 0 for no tokens.
double lexicon_ratio(const std::vector<std::string>& tokens, const Lexicon& lexicon);

}  // namespace lyrecon
