// Writes a synthetic, fully aligned dataset for offline runs and tests.

#include <CLI11.hpp>

#include <iostream>

#include "lyrecon/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic lyric-reconstruction fixture"};
  lyrecon::FixtureSpec spec;
  std::string out_dir;
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--tracks", spec.tracks)->capture_default_str();
  app.add_option("--vocab-size", spec.vocab_size)->capture_default_str();
  app.add_option("--max-words", spec.max_words_per_track, "Max distinct words per track")->capture_default_str();
  app.add_option("--seed", spec.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto paths = lyrecon::write_fixture(out_dir, spec);
  std::cout << paths.bow.string() << "\n"
            << paths.mood.string() << "\n"
            << paths.genre.string() << "\n"
            << paths.meta.string() << "\n"
            << paths.abstract.string() << "\n"
            << paths.concrete.string() << "\n";
  return 0;
}
