#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lyrecon {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// A point in the valence (x) / arousal (y) plane.
struct MoodPoint {
  double valence = 0.0;
  double arousal = 0.0;

  bool operator==(const MoodPoint&) const = default;
};

class MoodError : public std::runtime_error {
 public:
  enum class Code { ZeroMoodVector, NonFinite, Overlap, Gap, OutOfRange, EmptyLabel, Malformed };

  MoodError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// Angle between the positive valence axis and the point, in [0, 2pi).
double mood_angle(const MoodPoint& mood);

// Half-open arc [start, end) in radians. An entry with start > end wraps
// through zero and covers [start, 2pi) together with [0, end).
struct MoodArc {
  double start = 0.0;
  double end = 0.0;
  std::string label;

  bool wraps() const noexcept { return start > end; }
  bool contains(double theta) const noexcept {
    return wraps() ? (theta >= start || theta < end) : (theta >= start && theta < end);
  }
};

class MoodTable {
 public:
  // Validates on construction; throws MoodError (Overlap, Gap, OutOfRange, EmptyLabel).
  explicit MoodTable(std::vector<MoodArc> arcs);

  // Eight octants around the circumplex, "happy" centred on theta = 0.
  static MoodTable default_table();

  const std::string& label_for(double theta) const;
  const std::vector<MoodArc>& arcs() const noexcept { return arcs_; }
  std::vector<std::string> labels() const;

 private:
  std::vector<MoodArc> arcs_;
};

// Throws MoodError describing the first defect found.
void validate_mood_table(const std::vector<MoodArc>& arcs);

// theta must lie in [0, 2pi).
const std::string& mood_label(double theta, const MoodTable& table);

// Text format, one arc per line: `start_over_pi end_over_pi label`.
// Starts may be negative (down to -2) to express the arc through zero.
// Blank lines and `#` comments are skipped.
MoodTable load_mood_table(std::istream& in);
MoodTable load_mood_table_file(const std::string& path);
std::string default_mood_table_text();

}  // namespace lyrecon
