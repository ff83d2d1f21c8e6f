#include "lyrecon/prompt_builder.hpp"

#include <algorithm>

#include "strings.hpp"

namespace lyrecon {

std::string genre_string(const std::vector<std::string>& tags) {
  if (tags.empty()) throw PromptError(PromptError::Code::EmptyTags, "EmptyTags: record has no genre");
  return detail::join(tags, ", ");
}

std::string vocabulary_string(const std::vector<std::string>& words) {
  if (words.empty()) {
    throw PromptError(PromptError::Code::EmptyVocabulary, "EmptyVocabulary: record has no words");
  }
  return detail::join(words, ", ");
}

std::string render_template(const PromptFields& fields) {
  std::string text;
  text.reserve(fields.genre.size() + fields.artist.size() + fields.mood.size() +
               fields.title.size() + fields.vocabulary.size() + 128);
  text.append(kTemplatePieces[0]).append(fields.genre);
  text.append(kTemplatePieces[1]).append(fields.artist);
  text.append(kTemplatePieces[2]).append(fields.mood);
  text.append(kTemplatePieces[3]).append(fields.title);
  text.append(kTemplatePieces[4]).append(fields.vocabulary);
  text.append(kTemplatePieces[5]);
  return text;
}

Prompt build_prompt(const ReconstructionRecord& record, const PromptOptions& options) {
  Prompt prompt;
  prompt.track_id = record.track_id;
  prompt.fields.genre = genre_string(record.tags);
  prompt.fields.artist = record.artist;
  prompt.fields.mood = record.mood_label;
  prompt.fields.title = record.title;
  if (options.max_vocabulary_words && *options.max_vocabulary_words < record.vocabulary.size()) {
    std::vector<std::string> head(record.vocabulary.begin(),
                                  record.vocabulary.begin() +
                                      static_cast<std::ptrdiff_t>(*options.max_vocabulary_words));
    prompt.fields.vocabulary = vocabulary_string(head);
  } else {
    prompt.fields.vocabulary = vocabulary_string(record.vocabulary);
  }
  prompt.text = render_template(prompt.fields);
  return prompt;
}

}  // namespace lyrecon
