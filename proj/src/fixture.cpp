#include "lyrecon/fixture.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

namespace lyrecon {

namespace fs = std::filesystem;

namespace {

std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

std::string random_word(std::mt19937_64& rng) {
  static constexpr char kConsonants[] = "bcdfghjklmnprstvwz";
  static constexpr char kVowels[] = "aeiou";
  std::string word;
  const auto syllables = uniform(rng, 1, 3);
  for (std::uint64_t i = 0; i < syllables; ++i) {
    word.push_back(kConsonants[uniform(rng, 0, sizeof kConsonants - 2)]);
    word.push_back(kVowels[uniform(rng, 0, sizeof kVowels - 2)]);
  }
  if (uniform(rng, 0, 1)) word.push_back(kConsonants[uniform(rng, 0, sizeof kConsonants - 2)]);
  return word;
}

std::string track_id(std::mt19937_64& rng) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string id = "TR";
  for (int i = 0; i < 16; ++i) id.push_back(kAlphabet[uniform(rng, 0, sizeof kAlphabet - 2)]);
  return id;
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

BowCorpus random_bow_corpus(std::mt19937_64& rng, std::size_t vocab_size, std::size_t tracks,
                            std::size_t max_entries) {
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  while (words.size() < vocab_size) {
    auto w = random_word(rng);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  BowCorpus corpus{VocabTable(std::move(words)), {}};
  std::unordered_set<std::string> ids;
  while (corpus.tracks.size() < tracks) {
    TrackBow track;
    track.track_id = track_id(rng);
    if (!ids.insert(track.track_id).second) continue;
    if (uniform(rng, 0, 3) != 0) track.source_id = std::to_string(uniform(rng, 1, 9999999));
    const auto entries = uniform(rng, 1, std::min(max_entries, vocab_size));
    while (track.counts.size() < entries) {
      const auto index = static_cast<std::uint32_t>(uniform(rng, 1, vocab_size));
      // Heavy-tailed counts, like real lyrics.
      const auto count = static_cast<std::uint32_t>(1 + (uniform(rng, 0, 3) == 0 ? uniform(rng, 0, 30) : uniform(rng, 0, 3)));
      track.counts.emplace(index, count);
    }
    corpus.tracks.push_back(std::move(track));
  }
  return corpus;
}

FixturePaths write_fixture(const fs::path& dir, const FixtureSpec& spec) {
  fs::create_directories(dir);
  std::mt19937_64 rng(spec.seed);
  const auto corpus = random_bow_corpus(rng, spec.vocab_size, spec.tracks, spec.max_words_per_track);

  FixturePaths paths{dir / "bow.txt", dir / "mood.csv", dir / "genre.tsv",
                     dir / "meta.csv", dir / "abstract.txt", dir / "concrete.txt"};
  write(paths.bow, serialize_bow(corpus));

  static const char* kGenres[] = {"Rock", "Pop", "Electronic", "Jazz", "Folk", "Experimental", "Rap", "Country"};
  static const char* kTitleWords[] = {"Night", "River", "Falling", "Gold", "Echo", "Summer", "Ghost", "Line"};
  std::string mood = "track_id,valence,arousal\n";
  std::string genre;
  std::string meta = "track_id,artist,title\n";
  char buffer[128];
  for (std::size_t i = 0; i < corpus.tracks.size(); ++i) {
    const auto& id = corpus.tracks[i].track_id;
    double valence = 0.0;
    double arousal = 0.0;
    while (valence == 0.0 && arousal == 0.0) {
      valence = (static_cast<double>(uniform(rng, 0, 400)) - 200.0) / 100.0;
      arousal = (static_cast<double>(uniform(rng, 0, 400)) - 200.0) / 100.0;
    }
    std::snprintf(buffer, sizeof buffer, "%s,%.2f,%.2f\n", id.c_str(), valence, arousal);
    mood += buffer;

    const auto n_genres = uniform(rng, 1, 2);
    std::set<std::size_t> picked;
    while (picked.size() < n_genres) picked.insert(uniform(rng, 0, std::size(kGenres) - 1));
    for (auto g : picked) genre += id + "\t" + kGenres[g] + "\n";

    const std::string title = std::string(kTitleWords[uniform(rng, 0, std::size(kTitleWords) - 1)]) + " " +
                              kTitleWords[uniform(rng, 0, std::size(kTitleWords) - 1)];
    // Every fifth artist carries a comma to exercise quoting.
    const std::string artist = i % 5 == 0 ? "\"Band " + std::to_string(i) + ", The\"" : "Artist " + std::to_string(i);
    meta += id + "," + artist + "," + title + "\n";
  }
  write(paths.mood, mood);
  write(paths.genre, genre);
  write(paths.meta, meta);

  // Lexicons drawn from the vocabulary so the ratios are non-trivial.
  std::string abstract_words = "# synthetic abstract lexicon\n";
  std::string concrete_words = "# synthetic concrete lexicon\n";
  const auto& words = corpus.vocab.words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i % 7 == 0) abstract_words += words[i] + "\n";
    if (i % 5 == 1) concrete_words += words[i] + "\n";
  }
  write(paths.abstract, abstract_words);
  write(paths.concrete, concrete_words);
  return paths;
}

}  // namespace lyrecon
