#include "lyrecon/bow_corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "strings.hpp"

namespace lyrecon {

namespace {

std::string format_message(BowError::Code code, std::size_t line_no, const std::string& detail) {
  std::string msg(to_string(code));
  if (line_no > 0) msg += " at line " + std::to_string(line_no);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

enum class NumberStatus { Ok, Negative, Invalid };

NumberStatus parse_u32(std::string_view text, std::uint32_t& value) {
  if (!text.empty() && text.front() == '-') return NumberStatus::Negative;
  if (text.empty()) return NumberStatus::Invalid;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return NumberStatus::Invalid;
  return NumberStatus::Ok;
}

TrackBow parse_track_line(std::string_view line, std::size_t line_no, const VocabTable& vocab) {
  using Code = BowError::Code;
  auto fields = detail::split(line, ',');
  if (fields.size() < 2 || fields[0].empty()) {
    throw BowError(Code::MalformedLine, line_no, "expected track_id,source_id,idx:cnt,...");
  }
  if (fields.size() < 3) throw BowError(Code::EmptyTrack, line_no, std::string(fields[0]));

  TrackBow track;
  track.track_id = std::string(fields[0]);
  track.source_id = std::string(fields[1]);
  for (std::size_t i = 2; i < fields.size(); ++i) {
    const auto pair = fields[i];
    const auto colon = pair.find(':');
    if (colon == std::string_view::npos) {
      throw BowError(Code::MalformedPair, line_no, "'" + std::string(pair) + "'");
    }
    std::uint32_t index = 0;
    std::uint32_t count = 0;
    if (parse_u32(pair.substr(0, colon), index) != NumberStatus::Ok) {
      throw BowError(Code::MalformedPair, line_no, "'" + std::string(pair) + "'");
    }
    switch (parse_u32(pair.substr(colon + 1), count)) {
      case NumberStatus::Ok:
        break;
      case NumberStatus::Negative:
        throw BowError(Code::NonPositiveCount, line_no, "'" + std::string(pair) + "'");
      case NumberStatus::Invalid:
        throw BowError(Code::MalformedPair, line_no, "'" + std::string(pair) + "'");
    }
    if (!vocab.contains_index(index)) {
      throw BowError(Code::IndexOutOfRange, line_no,
                     "index " + std::to_string(index) + " outside vocabulary of size " +
                         std::to_string(vocab.size()));
    }
    if (count == 0) throw BowError(Code::NonPositiveCount, line_no, "'" + std::string(pair) + "'");
    if (!track.counts.emplace(index, count).second) {
      throw BowError(Code::DuplicateIndex, line_no, "index " + std::to_string(index));
    }
  }
  return track;
}

}  // namespace

BowError::BowError(Code code, std::size_t line_no, const std::string& detail)
    : std::runtime_error(format_message(code, line_no, detail)), code_(code), line_(line_no) {}

std::string_view to_string(BowError::Code code) {
  using Code = BowError::Code;
  switch (code) {
    case Code::MissingVocabHeader: return "MissingVocabHeader";
    case Code::DuplicateVocabHeader: return "DuplicateVocabHeader";
    case Code::InvalidVocabWord: return "InvalidVocabWord";
    case Code::MalformedLine: return "MalformedLine";
    case Code::DuplicateVocabWord: return "DuplicateVocabWord";
    case Code::DuplicateTrackId: return "DuplicateTrackId";
    case Code::IndexOutOfRange: return "IndexOutOfRange";
    case Code::MalformedPair: return "MalformedPair";
    case Code::NonPositiveCount: return "NonPositiveCount";
    case Code::DuplicateIndex: return "DuplicateIndex";
    case Code::EmptyTrack: return "EmptyTrack";
  }
  return "BowError";
}

bool is_valid_vocab_word(std::string_view word) noexcept {
  if (word.empty()) return false;
  return std::none_of(word.begin(), word.end(),
                      [](char c) { return c == ',' || c == ':' || detail::is_space(c); });
}

VocabTable::VocabTable(std::vector<std::string> words) : words_(std::move(words)) {
  lookup_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!is_valid_vocab_word(words_[i])) {
      throw BowError(BowError::Code::InvalidVocabWord, 0, "'" + words_[i] + "'");
    }
    if (!lookup_.emplace(words_[i], static_cast<std::uint32_t>(i + 1)).second) {
      throw BowError(BowError::Code::DuplicateVocabWord, 0, "'" + words_[i] + "'");
    }
  }
}

const std::string& VocabTable::word(std::uint32_t index) const {
  if (!contains_index(index)) {
    throw BowError(BowError::Code::IndexOutOfRange, 0, "index " + std::to_string(index));
  }
  return words_[index - 1];
}

const TrackBow* BowCorpus::find(std::string_view track_id) const {
  auto it = std::find_if(tracks.begin(), tracks.end(),
                         [&](const TrackBow& t) { return t.track_id == track_id; });
  return it == tracks.end() ? nullptr : &*it;
}

BowCorpus load_bow(std::istream& in) {
  using Code = BowError::Code;
  BowCorpus corpus;
  bool have_vocab = false;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;

  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '%') {
      if (have_vocab) throw BowError(Code::DuplicateVocabHeader, line_no, "");
      std::vector<std::string> words;
      std::string_view body = std::string_view(line).substr(1);
      if (!body.empty()) {
        for (auto w : detail::split(body, ',')) words.emplace_back(w);
      }
      try {
        corpus.vocab = VocabTable(std::move(words));
      } catch (const BowError& e) {
        throw BowError(e.code(), line_no, "");
      }
      have_vocab = true;
      continue;
    }
    if (!have_vocab) throw BowError(Code::MissingVocabHeader, line_no, "data line before '%' header");

    auto track = parse_track_line(line, line_no, corpus.vocab);
    if (!seen_ids.insert(track.track_id).second) {
      throw BowError(Code::DuplicateTrackId, line_no, track.track_id);
    }
    corpus.tracks.push_back(std::move(track));
  }
  if (!have_vocab) throw BowError(Code::MissingVocabHeader, 0, "no '%' header line");
  return corpus;
}

BowCorpus load_bow_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_bow(in);
}

void serialize_bow(const BowCorpus& corpus, std::ostream& out) {
  out << '%' << detail::join(corpus.vocab.words(), ",") << '\n';
  for (const auto& track : corpus.tracks) {
    out << track.track_id << ',' << track.source_id;
    for (const auto& [index, count] : track.counts) out << ',' << index << ':' << count;
    out << '\n';
  }
}

std::string serialize_bow(const BowCorpus& corpus) {
  std::ostringstream out;
  serialize_bow(corpus, out);
  return out.str();
}

std::vector<std::string> ordered_vocabulary(const TrackBow& track, const VocabTable& vocab) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries(track.counts.begin(),
                                                                track.counts.end());
  // counts is keyed by index, so a stable sort by count keeps ascending index on ties.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  words.reserve(entries.size());
  for (const auto& [index, count] : entries) words.push_back(vocab.word(index));
  return words;
}

}  // namespace lyrecon
