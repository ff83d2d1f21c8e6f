#include "lyrecon/mood_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "strings.hpp"

namespace lyrecon {

namespace {

struct Piece {
  double start;
  double end;
  std::size_t owner;
};

std::string format_angle(double radians) {
  std::ostringstream out;
  out << radians / std::numbers::pi << "pi";
  return out.str();
}

}  // namespace

double mood_angle(const MoodPoint& mood) {
  if (!std::isfinite(mood.valence) || !std::isfinite(mood.arousal)) {
    throw MoodError(MoodError::Code::NonFinite, "mood point has a non-finite coordinate");
  }
  if (mood.valence == 0.0 && mood.arousal == 0.0) {
    throw MoodError(MoodError::Code::ZeroMoodVector, "ZeroMoodVector: angle of (0, 0) is undefined");
  }
  double theta = std::atan2(mood.arousal, mood.valence);
  if (theta < 0.0) theta += kTwoPi;
  // A tiny negative angle rounds up to exactly 2pi, which is the same direction as 0.
  if (theta >= kTwoPi || theta == 0.0) theta = 0.0;
  return theta;
}

void validate_mood_table(const std::vector<MoodArc>& arcs) {
  using Code = MoodError::Code;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& arc = arcs[i];
    const bool in_range = std::isfinite(arc.start) && std::isfinite(arc.end) && arc.start >= 0.0 &&
                          arc.start < kTwoPi && arc.end >= 0.0 && arc.end <= kTwoPi &&
                          arc.start != arc.end;
    if (!in_range) {
      throw MoodError(Code::OutOfRange, "OutOfRange(" + std::to_string(i) + "): arc [" +
                                            format_angle(arc.start) + ", " +
                                            format_angle(arc.end) + ") is not a valid arc");
    }
    if (detail::trim(arc.label).empty()) {
      throw MoodError(Code::EmptyLabel, "EmptyLabel(" + std::to_string(i) + ")");
    }
    if (arc.wraps()) {
      pieces.push_back({arc.start, kTwoPi, i});
      if (arc.end > 0.0) pieces.push_back({0.0, arc.end, i});
    } else {
      pieces.push_back({arc.start, arc.end, i});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });

  double cursor = 0.0;
  std::size_t previous = 0;
  bool first = true;
  for (const auto& piece : pieces) {
    if (piece.start > cursor) {
      throw MoodError(Code::Gap, "Gap(at " + format_angle(cursor) + ")");
    }
    if (piece.start < cursor) {
      const auto a = std::min(previous, piece.owner);
      const auto b = std::max(previous, piece.owner);
      throw MoodError(Code::Overlap,
                      "Overlap(" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    cursor = piece.end;
    previous = piece.owner;
    first = false;
  }
  if (first || cursor < kTwoPi) {
    throw MoodError(Code::Gap, "Gap(at " + format_angle(cursor) + ")");
  }
}

MoodTable::MoodTable(std::vector<MoodArc> arcs) : arcs_(std::move(arcs)) {
  validate_mood_table(arcs_);
}

MoodTable MoodTable::default_table() {
  std::istringstream in(default_mood_table_text());
  return load_mood_table(in);
}

const std::string& MoodTable::label_for(double theta) const {
  if (!(theta >= 0.0 && theta < kTwoPi)) {
    throw MoodError(MoodError::Code::OutOfRange, "theta " + format_angle(theta) + " outside [0, 2pi)");
  }
  for (const auto& arc : arcs_) {
    if (arc.contains(theta)) return arc.label;
  }
  // Unreachable for a validated table.
  throw MoodError(MoodError::Code::Gap, "Gap(at " + format_angle(theta) + ")");
}

std::vector<std::string> MoodTable::labels() const {
  std::vector<std::string> out;
  for (const auto& arc : arcs_) {
    if (std::find(out.begin(), out.end(), arc.label) == out.end()) out.push_back(arc.label);
  }
  return out;
}

const std::string& mood_label(double theta, const MoodTable& table) { return table.label_for(theta); }

MoodTable load_mood_table(std::istream& in) {
  std::vector<MoodArc> arcs;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    double start_over_pi = 0.0;
    double end_over_pi = 0.0;
    std::string label;
    if (!(fields >> start_over_pi >> end_over_pi) || !std::getline(fields, label)) {
      throw MoodError(MoodError::Code::Malformed,
                      "mood table line " + std::to_string(line_no) + ": expected `start end label`");
    }
    if (start_over_pi < 0.0) start_over_pi += 2.0;
    arcs.push_back({start_over_pi * std::numbers::pi, end_over_pi * std::numbers::pi,
                    std::string(detail::trim(label))});
  }
  return MoodTable(std::move(arcs));
}

MoodTable load_mood_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_mood_table(in);
}

std::string default_mood_table_text() {
  return "-0.125 0.125 happy\n"
         "0.125 0.375 excited\n"
         "0.375 0.625 energetic\n"
         "0.625 0.875 tense\n"
         "0.875 1.125 sad\n"
         "1.125 1.375 depressed\n"
         "1.375 1.625 sleepy\n"
         "1.625 1.875 relaxed\n";
}

}  // namespace lyrecon
