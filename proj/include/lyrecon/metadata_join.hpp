#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lyrecon/bow_corpus.hpp"
#include "lyrecon/mood_model.hpp"

namespace lyrecon {

class MetadataError : public std::runtime_error {
 public:
  enum class Code {
    MissingHeader,
    MissingColumn,
    MalformedLine,
    NonNumericValue,
    DuplicateId,
    ZeroMoodVector,
    EmptyField,
    EmptyGenre,
  };

  MetadataError(Code code, std::size_t line_no, const std::string& detail);

  Code code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Code code_;
  std::size_t line_;
};

std::string_view to_string(MetadataError::Code code);

struct TrackMeta {
  std::string track_id;
  std::string artist;
  std::string title;

  bool operator==(const TrackMeta&) const = default;
};

struct GenreTags {
  std::string track_id;
  std::vector<std::string> tags;

  bool operator==(const GenreTags&) const = default;
};

// Header names of the columns to read; tables are cited without fixed schemas.
struct MoodColumns {
  std::string id = "track_id";
  std::string valence = "valence";
  std::string arousal = "arousal";
  char delimiter = ',';
};

struct MetaColumns {
  std::string id = "track_id";
  std::string artist = "artist";
  std::string title = "title";
  char delimiter = ',';
};

using MoodMap = std::unordered_map<std::string, MoodPoint>;
using GenreMap = std::unordered_map<std::string, GenreTags>;
using MetaMap = std::unordered_map<std::string, TrackMeta>;

// One delimiter-separated record. `line` is where the record starts.
struct DelimitedRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Double-quote quoting with "" as the escaped quote; unquoted fields are
// trimmed; blank lines are skipped. Quoted fields may span lines.
std::vector<DelimitedRow> read_delimited(std::istream& in, char delimiter);

MoodMap parse_mood_table(std::istream& in, const MoodColumns& columns = {});
GenreMap parse_genre_table(std::istream& in);
MetaMap parse_track_meta(std::istream& in, const MetaColumns& columns = {});

struct ReconstructionRecord {
  std::string track_id;
  std::string artist;
  std::string title;
  std::vector<std::string> tags;
  MoodPoint mood;
  double theta = 0.0;
  std::string mood_label;
  std::vector<std::string> vocabulary;

  bool operator==(const ReconstructionRecord&) const = default;
};

struct JoinReport {
  std::size_t bow_tracks = 0;
  std::size_t mood_rows = 0;
  std::size_t genre_tracks = 0;
  std::size_t meta_rows = 0;
  std::size_t zero_mood_skipped = 0;
  std::size_t joined = 0;

  bool operator==(const JoinReport&) const = default;
};

struct JoinResult {
  std::vector<ReconstructionRecord> records;  // sorted by track_id
  JoinReport report;
};

// Inner join on exact track id across BoW, mood, genre and artist/title.
JoinResult join_records(const BowCorpus& bow, const MoodMap& mood, const GenreMap& genres,
                        const MetaMap& meta, const MoodTable& mood_table);

std::string format_join_report(const JoinReport& report);

}  // namespace lyrecon
