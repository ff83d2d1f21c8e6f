#include "lyrecon/metadata_join.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <unordered_set>

#include "strings.hpp"

namespace lyrecon {

namespace {

using Code = MetadataError::Code;

std::string format_message(Code code, std::size_t line_no, const std::string& detail) {
  std::string msg(to_string(code));
  if (line_no > 0) msg += " at line " + std::to_string(line_no);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

class RowReader {
 public:
  RowReader(std::string text, char delimiter) : text_(std::move(text)), delim_(delimiter) {}

  bool next(DelimitedRow& row) {
    while (pos_ < text_.size()) {
      if (at_line_end()) {  // blank line
        consume_line_end();
        continue;
      }
      row.line = line_;
      row.fields.clear();
      read_record(row.fields);
      return true;
    }
    return false;
  }

 private:
  bool at_line_end() const {
    return text_[pos_] == '\n' || (text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n');
  }

  void consume_line_end() {
    if (text_[pos_] == '\r') ++pos_;
    ++pos_;
    ++line_;
  }

  void skip_blanks() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t') && text_[pos_] != delim_) ++pos_;
  }

  void read_record(std::vector<std::string>& fields) {
    const std::size_t start_line = line_;
    while (true) {
      fields.push_back(read_field(start_line));
      if (pos_ >= text_.size()) return;
      if (at_line_end()) {
        consume_line_end();
        return;
      }
      ++pos_;  // delimiter
    }
  }

  std::string read_field(std::size_t start_line) {
    const std::size_t begin = pos_;
    skip_blanks();
    if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      std::string value;
      while (true) {
        if (pos_ >= text_.size()) {
          throw MetadataError(Code::MalformedLine, start_line, "unterminated quoted field");
        }
        const char c = text_[pos_++];
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            value.push_back('"');
            ++pos_;
            continue;
          }
          break;
        }
        if (c == '\n') ++line_;
        value.push_back(c);
      }
      skip_blanks();
      if (pos_ < text_.size() && text_[pos_] != delim_ && !at_line_end()) {
        throw MetadataError(Code::MalformedLine, start_line, "text after closing quote");
      }
      return value;
    }
    pos_ = begin;
    while (pos_ < text_.size() && text_[pos_] != delim_ && !at_line_end()) ++pos_;
    return std::string(detail::trim(std::string_view(text_).substr(begin, pos_ - begin)));
  }

  std::string text_;
  char delim_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::size_t column_index(const DelimitedRow& header, const std::string& name) {
  auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end()) {
    throw MetadataError(Code::MissingColumn, header.line, "no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.fields.begin());
}

const std::string& field_at(const DelimitedRow& row, std::size_t index) {
  if (index >= row.fields.size()) {
    throw MetadataError(Code::MalformedLine, row.line,
                        "expected at least " + std::to_string(index + 1) + " fields, got " +
                            std::to_string(row.fields.size()));
  }
  return row.fields[index];
}

double parse_real(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw MetadataError(Code::NonNumericValue, line_no, "'" + text + "'");
  }
  return value;
}

template <typename Map, typename Build>
Map parse_keyed_table(std::istream& in, char delimiter, Build&& build) {
  RowReader reader(slurp(in), delimiter);
  DelimitedRow header;
  if (!reader.next(header)) throw MetadataError(Code::MissingHeader, 0, "table is empty");
  auto on_row = build(header);
  Map out;
  DelimitedRow row;
  while (reader.next(row)) {
    auto [id, value] = on_row(row);
    if (id.empty()) throw MetadataError(Code::EmptyField, row.line, "empty track id");
    if (!out.emplace(id, std::move(value)).second) {
      throw MetadataError(Code::DuplicateId, row.line, id);
    }
  }
  return out;
}

}  // namespace

MetadataError::MetadataError(Code code, std::size_t line_no, const std::string& detail)
    : std::runtime_error(format_message(code, line_no, detail)), code_(code), line_(line_no) {}

std::string_view to_string(MetadataError::Code code) {
  switch (code) {
    case Code::MissingHeader: return "MissingHeader";
    case Code::MissingColumn: return "MissingColumn";
    case Code::MalformedLine: return "MalformedLine";
    case Code::NonNumericValue: return "NonNumericValue";
    case Code::DuplicateId: return "DuplicateId";
    case Code::ZeroMoodVector: return "ZeroMoodVector";
    case Code::EmptyField: return "EmptyField";
    case Code::EmptyGenre: return "EmptyGenre";
  }
  return "MetadataError";
}

std::vector<DelimitedRow> read_delimited(std::istream& in, char delimiter) {
  RowReader reader(slurp(in), delimiter);
  std::vector<DelimitedRow> rows;
  DelimitedRow row;
  while (reader.next(row)) rows.push_back(row);
  return rows;
}

MoodMap parse_mood_table(std::istream& in, const MoodColumns& columns) {
  return parse_keyed_table<MoodMap>(in, columns.delimiter, [&](const DelimitedRow& header) {
    const auto id_col = column_index(header, columns.id);
    const auto valence_col = column_index(header, columns.valence);
    const auto arousal_col = column_index(header, columns.arousal);
    return [=](const DelimitedRow& row) {
      MoodPoint point{parse_real(field_at(row, valence_col), row.line),
                      parse_real(field_at(row, arousal_col), row.line)};
      if (point.valence == 0.0 && point.arousal == 0.0) {
        throw MetadataError(Code::ZeroMoodVector, row.line, field_at(row, id_col));
      }
      return std::pair{field_at(row, id_col), point};
    };
  });
}

MetaMap parse_track_meta(std::istream& in, const MetaColumns& columns) {
  return parse_keyed_table<MetaMap>(in, columns.delimiter, [&](const DelimitedRow& header) {
    const auto id_col = column_index(header, columns.id);
    const auto artist_col = column_index(header, columns.artist);
    const auto title_col = column_index(header, columns.title);
    return [=](const DelimitedRow& row) {
      TrackMeta meta{field_at(row, id_col), field_at(row, artist_col), field_at(row, title_col)};
      if (detail::trim(meta.artist).empty()) {
        throw MetadataError(Code::EmptyField, row.line, "empty artist");
      }
      if (detail::trim(meta.title).empty()) {
        throw MetadataError(Code::EmptyField, row.line, "empty title");
      }
      return std::pair{meta.track_id, meta};
    };
  });
}

GenreMap parse_genre_table(std::istream& in) {
  GenreMap out;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() < 2 || detail::trim(fields[0]).empty()) {
      throw MetadataError(Code::MalformedLine, line_no, "expected track_id<TAB>genre");
    }
    const std::string id(detail::trim(fields[0]));
    auto& entry = out[id];
    entry.track_id = id;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::string genre(detail::trim(fields[i]));
      if (genre.empty()) throw MetadataError(Code::EmptyGenre, line_no, id);
      if (std::find(entry.tags.begin(), entry.tags.end(), genre) == entry.tags.end()) {
        entry.tags.push_back(std::move(genre));
      }
    }
  }
  return out;
}

JoinResult join_records(const BowCorpus& bow, const MoodMap& mood, const GenreMap& genres,
                        const MetaMap& meta, const MoodTable& mood_table) {
  JoinResult result;
  auto& report = result.report;
  report.bow_tracks = bow.tracks.size();
  report.mood_rows = mood.size();
  report.genre_tracks = genres.size();
  report.meta_rows = meta.size();

  for (const auto& track : bow.tracks) {
    auto mood_it = mood.find(track.track_id);
    auto genre_it = genres.find(track.track_id);
    auto meta_it = meta.find(track.track_id);
    if (mood_it == mood.end() || genre_it == genres.end() || meta_it == meta.end()) continue;
    if (genre_it->second.tags.empty()) continue;
    const MoodPoint point = mood_it->second;
    if (point.valence == 0.0 && point.arousal == 0.0) {
      ++report.zero_mood_skipped;
      continue;
    }
    ReconstructionRecord record;
    record.track_id = track.track_id;
    record.artist = meta_it->second.artist;
    record.title = meta_it->second.title;
    record.tags = genre_it->second.tags;
    record.mood = point;
    record.theta = mood_angle(point);
    record.mood_label = mood_table.label_for(record.theta);
    record.vocabulary = ordered_vocabulary(track, bow.vocab);
    result.records.push_back(std::move(record));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const auto& a, const auto& b) { return a.track_id < b.track_id; });
  report.joined = result.records.size();
  return result;
}

std::string format_join_report(const JoinReport& report) {
  std::string out;
  out += "bow: " + std::to_string(report.bow_tracks) + "\n";
  out += "mood: " + std::to_string(report.mood_rows) + "\n";
  out += "genre: " + std::to_string(report.genre_tracks) + "\n";
  out += "meta: " + std::to_string(report.meta_rows) + "\n";
  if (report.zero_mood_skipped > 0) {
    out += "zero_mood_skipped: " + std::to_string(report.zero_mood_skipped) + "\n";
  }
  out += "joined: " + std::to_string(report.joined) + "\n";
  return out;
}

}  // namespace lyrecon
