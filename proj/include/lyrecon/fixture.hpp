#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "lyrecon/bow_corpus.hpp"

namespace lyrecon {

// Random valid corpus: unique lowercase vocabulary, unique track ids,
// 1..max_entries pairs per track.
BowCorpus random_bow_corpus(std::mt19937_64& rng, std::size_t vocab_size, std::size_t tracks,
                            std::size_t max_entries);

struct FixtureSpec {
  std::size_t tracks = 100;
  std::size_t vocab_size = 400;
  std::size_t max_words_per_track = 40;
  std::uint64_t seed = 1;
};

struct FixturePaths {
  std::filesystem::path bow;       // bow.txt
  std::filesystem::path mood;      // mood.csv (track_id,valence,arousal)
  std::filesystem::path genre;     // genre.tsv
  std::filesystem::path meta;      // meta.csv (track_id,artist,title)
  std::filesystem::path abstract;  // abstract.txt
  std::filesystem::path concrete;  // concrete.txt
};

// Writes a fully aligned synthetic dataset: every track id appears in all
// four inputs, so the join keeps all of them.
FixturePaths write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec);

}  // namespace lyrecon
