#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lyrecon/metadata_join.hpp"

namespace lyrecon {

class PromptError : public std::runtime_error {
 public:
  enum class Code { EmptyTags, EmptyVocabulary };

  PromptError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// The values substituted into the template, kept for auditing.
struct PromptFields {
  std::string genre;
  std::string artist;
  std::string mood;
  std::string title;
  std::string vocabulary;

  bool operator==(const PromptFields&) const = default;
};

struct Prompt {
  std::string text;
  std::string track_id;
  PromptFields fields;

  bool operator==(const Prompt&) const = default;
};

struct PromptOptions {
  // Keep only the N most frequent words. Unset means no cap.
  std::optional<std::size_t> max_vocabulary_words;
};

// Connective text between the five slots, in slot order. Rendering is
// kTemplatePieces[0] + genre + [1] + artist + [2] + mood + [3] + title + [4] + vocabulary + [5].
inline constexpr std::string_view kTemplatePieces[6] = {
    "Compose ",
    " lyrics, in a style reminiscent of ",
    " which represents a ",
    " mood under the title of ",
    " using the following vocabulary ",
    ".",
};

std::string genre_string(const std::vector<std::string>& tags);
std::string vocabulary_string(const std::vector<std::string>& words);
std::string render_template(const PromptFields& fields);

Prompt build_prompt(const ReconstructionRecord& record, const PromptOptions& options = {});

}  // namespace lyrecon
