#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lyrecon {

// musiXmatch-style Bag-of-Words files:
//
//   # comment
//   %word1,word2,word3
//   TRACK_ID,SOURCE_ID,1:4,3:1
//
// Word indices are 1-based into the vocabulary line.

class BowError : public std::runtime_error {
 public:
  enum class Code {
    MissingVocabHeader,
    DuplicateVocabHeader,
    InvalidVocabWord,
    MalformedLine,
    DuplicateVocabWord,
    DuplicateTrackId,
    IndexOutOfRange,
    MalformedPair,
    NonPositiveCount,
    DuplicateIndex,
    EmptyTrack,
  };

  BowError(Code code, std::size_t line_no, const std::string& detail);

  Code code() const noexcept { return code_; }
  // 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Code code_;
  std::size_t line_;
};

std::string_view to_string(BowError::Code code);

class VocabTable {
 public:
  VocabTable() = default;
  // Throws BowError on duplicate or invalid words.
  explicit VocabTable(std::vector<std::string> words);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  // 1-based.
  const std::string& word(std::uint32_t index) const;
  bool contains_index(std::uint32_t index) const noexcept {
    return index >= 1 && index <= words_.size();
  }
  const std::vector<std::string>& words() const noexcept { return words_; }

  bool operator==(const VocabTable& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

bool is_valid_vocab_word(std::string_view word) noexcept;

struct TrackBow {
  std::string track_id;
  std::string source_id;
  std::map<std::uint32_t, std::uint32_t> counts;  // word index -> count

  bool operator==(const TrackBow&) const = default;
};

struct BowCorpus {
  VocabTable vocab;
  std::vector<TrackBow> tracks;

  const TrackBow* find(std::string_view track_id) const;

  bool operator==(const BowCorpus&) const = default;
};

BowCorpus load_bow(std::istream& in);
BowCorpus load_bow_file(const std::string& path);

// Canonical form: LF endings, no comments, pairs in ascending index order.
void serialize_bow(const BowCorpus& corpus, std::ostream& out);
std::string serialize_bow(const BowCorpus& corpus);

// Words of the track ordered by count descending, ties by ascending index.
std::vector<std::string> ordered_vocabulary(const TrackBow& track, const VocabTable& vocab);

}  // namespace lyrecon
