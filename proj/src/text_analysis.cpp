#include "lyrecon/text_analysis.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>

#include "strings.hpp"

namespace lyrecon {

namespace {

char ascii_lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_blank(std::string_view line) { return detail::trim(line).empty(); }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(text[i])) ++i;
    if (i == text.size()) break;
    std::string token;
    while (i < text.size() && !detail::is_space(text[i])) token.push_back(ascii_lower(text[i++]));
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::size_t LyricDoc::token_count() const noexcept {
  std::size_t total = 0;
  for (const auto& line : tokens) total += line.size();
  return total;
}

LyricDoc segment(std::string text) {
  LyricDoc doc;
  doc.raw = std::move(text);
  std::string_view rest(doc.raw);
  bool in_section = false;
  while (true) {
    const auto newline = rest.find('\n');
    std::string_view line = rest.substr(0, newline);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_blank(line)) {
      in_section = false;
    } else {
      if (!in_section) doc.sections.push_back({doc.lines.size(), doc.lines.size()});
      in_section = true;
      doc.lines.emplace_back(line);
      doc.tokens.push_back(tokenize(line));
      doc.sections.back().end_line = doc.lines.size();
    }
    if (newline == std::string_view::npos) break;
    rest.remove_prefix(newline + 1);
  }
  return doc;
}

std::vector<std::vector<std::string>> ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  std::vector<std::vector<std::string>> out;
  if (n == 0 || tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return out;
}

std::vector<std::string> ngram_keys(const std::vector<std::string>& tokens, std::size_t n) {
  std::vector<std::string> out;
  if (n == 0 || tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back(' ');
      key.append(tokens[i + j]);
    }
    out.push_back(std::move(key));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Porter stemmer
// ---------------------------------------------------------------------------

namespace {

class PorterStemmer {
 public:
  explicit PorterStemmer(std::string_view word) : w_(word) {}

  std::string run() {
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  bool is_consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] over w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(i)) ++i;
    while (i < len) {
      while (i < len && !is_consonant(i)) ++i;
      if (i == len) break;
      while (i < len && is_consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && is_consonant(len - 1);
  }

  // *o: stem ends consonant-vowel-consonant, final consonant not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!is_consonant(len - 3) || is_consonant(len - 2) || !is_consonant(len - 1)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends_with(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view replacement) {
    w_.resize(stem_len(suffix));
    w_.append(replacement);
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  // The longest matching suffix decides; when its condition fails no other
  // rule in the step is tried. Rule lists are ordered so longer suffixes that
  // share an ending come first.
  template <std::size_t N, typename Cond>
  void apply_longest(const Rule (&rules)[N], Cond&& condition) {
    const Rule* best = nullptr;
    for (const auto& rule : rules) {
      if (ends_with(rule.suffix) && (!best || rule.suffix.size() > best->suffix.size())) best = &rule;
    }
    if (best && condition(*best)) replace_suffix(best->suffix, best->replacement);
  }

  void step1a() {
    if (ends_with("sses")) {
      replace_suffix("sses", "ss");
    } else if (ends_with("ies")) {
      replace_suffix("ies", "i");
    } else if (ends_with("ss")) {
      // unchanged
    } else if (ends_with("s")) {
      replace_suffix("s", "");
    }
  }

  void step1b() {
    bool strip_followup = false;
    if (ends_with("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
    } else if (ends_with("ed")) {
      if (has_vowel(stem_len("ed"))) {
        replace_suffix("ed", "");
        strip_followup = true;
      }
    } else if (ends_with("ing")) {
      if (has_vowel(stem_len("ing"))) {
        replace_suffix("ing", "");
        strip_followup = true;
      }
    }
    if (!strip_followup) return;

    if (ends_with("at")) {
      replace_suffix("at", "ate");
    } else if (ends_with("bl")) {
      replace_suffix("bl", "ble");
    } else if (ends_with("iz")) {
      replace_suffix("iz", "ize");
    } else if (double_consonant(w_.size())) {
      const char last = w_.back();
      if (last != 'l' && last != 's' && last != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_.push_back('e');
    }
  }

  void step1c() {
    if (ends_with("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    };
    apply_longest(rules, [&](const Rule& r) { return measure(stem_len(r.suffix)) > 0; });
  }

  void step3() {
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    apply_longest(rules, [&](const Rule& r) { return measure(stem_len(r.suffix)) > 0; });
  }

  void step4() {
    static constexpr Rule rules[] = {
        {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},  {"able", ""},
        {"ible", ""}, {"ant", ""}, {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ion", ""},
        {"ou", ""},  {"ism", ""},  {"ate", ""},  {"iti", ""}, {"ous", ""}, {"ive", ""},
        {"ize", ""},
    };
    apply_longest(rules, [&](const Rule& r) {
      const auto len = stem_len(r.suffix);
      if (measure(len) <= 1) return false;
      if (r.suffix == "ion") return len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
      return true;
    });
  }

  void step5a() {
    if (!ends_with("e")) return;
    const auto len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
  }

  std::string w_;
};

}  // namespace

std::string stem(std::string_view word) {
  if (word.empty()) return std::string();
  return PorterStemmer(word).run();
}

Lexicon::Lexicon(std::string name, std::unordered_set<std::string> words) : name_(std::move(name)) {
  if (words.empty()) throw LexiconError("EmptyLexicon: lexicon '" + name_ + "' has no words");
  for (const auto& w : words) {
    std::string lowered;
    lowered.reserve(w.size());
    for (char c : w) lowered.push_back(ascii_lower(c));
    words_.insert(std::move(lowered));
  }
}

Lexicon load_lexicon(std::istream& in, std::string name) {
  std::unordered_set<std::string> words;
  std::string line;
  while (detail::read_line(in, line)) {
    auto word = detail::trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.emplace(word);
  }
  return Lexicon(std::move(name), std::move(words));
}

Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_lexicon(in, std::filesystem::path(path).stem().string());
}

double lexicon_ratio(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  if (tokens.empty()) return 0.0;
  const auto hits = std::count_if(tokens.begin(), tokens.end(),
                                  [&](const std::string& t) { return lexicon.contains(t); });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.size());
}

}  // namespace lyrecon
