#include "lyrecon/generation_backend.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <random>
#include <regex>
#include <set>
#include <vector>

#include "lyrecon/evaluation.hpp"
#include "lyrecon/text_analysis.hpp"
#include "support/fake_chat_server.hpp"

namespace fs = std::filesystem;

namespace lyrecon {
namespace {

ReconstructionRecord record_with(const std::string& id, std::vector<std::string> vocabulary) {
  ReconstructionRecord r;
  r.track_id = id;
  r.artist = "Artist " + id;
  r.title = "Title " + id;
  r.tags = {"Rock"};
  r.mood = {1.0, 1.0};
  r.mood_label = "happy";
  r.vocabulary = std::move(vocabulary);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lyrecon_gen_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

class CountingBackend : public Backend {
 public:
  std::string complete(const Prompt& prompt, const BackendConfig&) override {
    ++calls;
    return mock_generate(prompt);
  }
  std::atomic<int> calls{0};
};

TEST(CacheKey, StableHexAndSensitive) {
  const DecodingParams d{};
  const auto a = cache_key("prompt", "gpt-4o", d);
  EXPECT_EQ(a, cache_key("prompt", "gpt-4o", d));
  EXPECT_TRUE(std::regex_match(a, std::regex("[0-9a-f]{64}")));
  EXPECT_NE(a, cache_key("prompt", "gpt-4o", DecodingParams{0.8, 1024}));
  EXPECT_NE(a, cache_key("prompt", "gpt-4o", DecodingParams{0.7, 512}));
  EXPECT_NE(a, cache_key("prompt", "other", d));
  EXPECT_NE(a, cache_key("prompt.", "gpt-4o", d));
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(MockGenerate, TwoWordVocabulary) {
  const auto prompt = build_prompt(record_with("T1", {"love", "night"}));
  const auto text = mock_generate(prompt);
  EXPECT_NE(text.find("love"), std::string::npos);
  EXPECT_NE(text.find("night"), std::string::npos);
  EXPECT_GE(segment(text).sections.size(), 2u);
  EXPECT_EQ(text, mock_generate(prompt));
}

TEST(MockGenerate, EmptyVocabularyRejected) {
  Prompt p;
  p.text = "x";
  EXPECT_THROW(mock_generate(p), PromptError);
}

TEST(MockGenerateProperty, ContractOverRandomVocabularies) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> vocab;
    std::set<std::string> seen;
    const auto n = 1 + rng() % 60;
    while (vocab.size() < n) {
      std::string w;
      const auto len = 1 + rng() % 8;
      for (std::size_t k = 0; k < len; ++k) w.push_back(static_cast<char>('a' + rng() % 26));
      if (seen.insert(w).second) vocab.push_back(w);
    }
    const auto prompt = build_prompt(record_with("T" + std::to_string(i), vocab));
    const auto text = mock_generate(prompt);
    const auto doc = segment(text);
    ASSERT_GE(doc.sections.size(), 2u);
    std::set<std::string> tokens;
    for (const auto& line : doc.tokens) tokens.insert(line.begin(), line.end());
    for (const auto& w : vocab) ASSERT_TRUE(tokens.count(w)) << w;
    ASSERT_EQ(text.find("\n\n\n"), std::string::npos);
    ASSERT_EQ(text, mock_generate(prompt));
  }
}

TEST(BackendConfig, Validation) {
  BackendConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_attempts = 0;
  EXPECT_THROW(c.validate(), GenerationError);
  c = {};
  c.max_in_flight = 0;
  EXPECT_THROW(c.validate(), GenerationError);
  c = {};
  c.decoding.temperature = -1;
  EXPECT_THROW(c.validate(), GenerationError);
  c = {};
  c.decoding.max_tokens = 0;
  EXPECT_THROW(c.validate(), GenerationError);
}

TEST(Generator, CacheHitCostsNothing) {
  const auto dir = fresh_dir("cachehit");
  ResultCache cache(dir);
  CountingBackend backend;
  Generator gen(backend, BackendConfig{}, &cache);
  const auto prompt = build_prompt(record_with("T1", {"love", "night"}));
  const auto first = gen.generate(prompt);
  EXPECT_FALSE(first.cached);
  EXPECT_EQ(first.attempts, 1);
  EXPECT_EQ(first.prompt_digest, cache_key(prompt.text, "gpt-4o", DecodingParams{}));
  EXPECT_TRUE(fs::exists(cache.path_for(first.prompt_digest)));
  const auto second = gen.generate(prompt);
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(second.attempts, 0);
  EXPECT_EQ(second.lyrics, first.lyrics);
  EXPECT_EQ(second.created_at, first.created_at);
  EXPECT_EQ(backend.calls, 1);

  // A fresh generator over the same directory also hits.
  CountingBackend other;
  Generator gen2(other, BackendConfig{}, &cache);
  EXPECT_TRUE(gen2.generate(prompt).cached);
  EXPECT_EQ(other.calls, 0);
  fs::remove_all(dir);
}

TEST(Generator, CacheFirstWriterWins) {
  const auto dir = fresh_dir("firstwriter");
  ResultCache cache(dir);
  GenerationResult r{"T1", std::string(64, 'a'), "first", "m", "t0", false, 1};
  cache.store(r);
  r.lyrics = "second";
  cache.store(r);
  EXPECT_EQ(cache.lookup(r.prompt_digest)->lyrics, "first");
  fs::remove_all(dir);
}

TEST(ResultJson, RoundTrip) {
  GenerationResult r{"T1", std::string(64, 'b'), "line \"one\"\n\nline two", "gpt-4o", "2024-01-01T00:00:00Z", false, 2};
  const auto back = result_from_json(result_to_json(r));
  EXPECT_EQ(back.track_id, r.track_id);
  EXPECT_EQ(back.lyrics, r.lyrics);
  EXPECT_EQ(back.model, r.model);
  EXPECT_EQ(back.created_at, r.created_at);
}

TEST(Timestamp, IsoUtc) {
  EXPECT_TRUE(std::regex_match(utc_timestamp_now(), std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}

TEST(ChatBackend, MissingKeyIsAuthMissing) {
  ::unsetenv(kApiKeyEnvVar);
  try {
    ChatCompletionBackend::from_environment();
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.code(), GenerationError::Code::AuthMissing);
  }
  ::setenv(kApiKeyEnvVar, "", 1);
  EXPECT_THROW(ChatCompletionBackend::from_environment(), GenerationError);
  ::unsetenv(kApiKeyEnvVar);
}

TEST(ChatBackend, RequestBodyShape) {
  const auto prompt = build_prompt(record_with("T1", {"love"}));
  BackendConfig c;
  const auto body = nlohmann::json::parse(chat_request_body(prompt, c));
  EXPECT_EQ(body["model"], "gpt-4o");
  EXPECT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], prompt.text);
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.7);
  EXPECT_EQ(body["max_tokens"], 1024);
  EXPECT_THROW(parse_chat_response("{}"), BackendFailure);
  EXPECT_THROW(parse_chat_response("not json"), BackendFailure);
}

struct LiveFixture : ::testing::Test {
  testsupport::FakeChatServer server;
  BackendConfig config;
  std::vector<double> delays;
  GeneratorHooks hooks;

  LiveFixture() {
    config.endpoint = server.endpoint();
    config.timeout_seconds = 10;
    hooks.sleep = [this](std::chrono::duration<double> d) { delays.push_back(d.count()); };
  }
};

TEST_F(LiveFixture, RetriesRateLimitThenSucceeds) {
  server.script({429, 429});
  ChatCompletionBackend backend("secret-key");
  Generator gen(backend, config, nullptr, hooks);
  const auto result = gen.generate(build_prompt(record_with("T1", {"love"})));
  EXPECT_EQ(result.attempts, 3);
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(server.last_authorization(), "Bearer secret-key");
  ASSERT_EQ(delays.size(), 2u);
  EXPECT_DOUBLE_EQ(delays[0], 1.0);
  EXPECT_DOUBLE_EQ(delays[1], 2.0);
  EXPECT_NE(result.lyrics.find("Compose Rock lyrics"), std::string::npos);
}

TEST_F(LiveFixture, GivesUpAfterMaxAttempts) {
  server.fail_always(503);
  config.max_attempts = 4;
  ChatCompletionBackend backend("k");
  Generator gen(backend, config, nullptr, hooks);
  try {
    gen.generate(build_prompt(record_with("T1", {"love"})));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.code(), GenerationError::Code::BackendUnavailable);
  }
  EXPECT_EQ(server.requests(), 4);
  ASSERT_EQ(delays.size(), 3u);
  EXPECT_TRUE(std::is_sorted(delays.begin(), delays.end()));
}

TEST_F(LiveFixture, PermanentErrorNotRetried) {
  server.script({401});
  ChatCompletionBackend backend("k");
  Generator gen(backend, config, nullptr, hooks);
  EXPECT_THROW(gen.generate(build_prompt(record_with("T1", {"love"}))), GenerationError);
  EXPECT_EQ(server.requests(), 1);
  EXPECT_TRUE(delays.empty());
}

TEST_F(LiveFixture, BlankCompletionRejected) {
  server.set_content("  \n ");
  ChatCompletionBackend backend("k");
  Generator gen(backend, config, nullptr, hooks);
  try {
    gen.generate(build_prompt(record_with("T1", {"love"})));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.code(), GenerationError::Code::EmptyCompletion);
  }
}

TEST_F(LiveFixture, UnreachableEndpointIsUnavailable) {
  config.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  config.max_attempts = 2;
  ChatCompletionBackend backend("k");
  Generator gen(backend, config, nullptr, hooks);
  EXPECT_THROW(gen.generate(build_prompt(record_with("T1", {"love"}))), GenerationError);
  EXPECT_EQ(delays.size(), 1u);
}

TEST_F(LiveFixture, BatchRespectsInFlightBound) {
  for (int bound : {1, 3}) {
    server.reset_counters();
    server.set_delay(std::chrono::milliseconds(20));
    config.max_in_flight = bound;
    ChatCompletionBackend backend("k");
    Generator gen(backend, config, nullptr, hooks);
    std::vector<Prompt> prompts;
    for (int i = 0; i < 12; ++i) prompts.push_back(build_prompt(record_with("T" + std::to_string(i), {"w"})));
    std::vector<int> seen(prompts.size(), 0);
    gen.generate_batch(prompts, [&](std::size_t index, BatchOutcome outcome) {
      ASSERT_TRUE(outcome.result.has_value());
      EXPECT_EQ(outcome.result->track_id, prompts[index].track_id);
      ++seen[index];
    });
    for (int s : seen) EXPECT_EQ(s, 1);
    EXPECT_EQ(server.requests(), 12);
    EXPECT_LE(server.peak_in_flight(), bound);
    EXPECT_GE(server.peak_in_flight(), 1);
  }
}

TEST_F(LiveFixture, BatchTwiceWithCacheMakesNoSecondCalls) {
  const auto dir = fresh_dir("batchcache");
  ResultCache cache(dir);
  ChatCompletionBackend backend("k");
  std::vector<Prompt> prompts;
  for (int i = 0; i < 8; ++i) prompts.push_back(build_prompt(record_with("T" + std::to_string(i), {"w"})));
  auto run = [&] {
    Generator gen(backend, config, &cache, hooks);
    std::vector<std::string> out(prompts.size());
    gen.generate_batch(prompts, [&](std::size_t i, BatchOutcome o) { out[i] = o.result->lyrics; });
    return out;
  };
  const auto first = run();
  const int after_first = server.requests();
  EXPECT_EQ(after_first, 8);
  EXPECT_EQ(run(), first);
  EXPECT_EQ(server.requests(), after_first);
  fs::remove_all(dir);
}

TEST(Generator, BatchFailuresAreReportedNotThrown) {
  struct Flaky : Backend {
    std::string complete(const Prompt& p, const BackendConfig&) override {
      if (p.track_id == "T1") throw BackendFailure(false, 400, "bad");
      return mock_generate(p);
    }
  } backend;
  Generator gen(backend, BackendConfig{}, nullptr);
  std::vector<Prompt> prompts{build_prompt(record_with("T0", {"a"})), build_prompt(record_with("T1", {"b"}))};
  int failures = 0, successes = 0;
  gen.generate_batch(prompts, [&](std::size_t, BatchOutcome o) { o.error ? ++failures : ++successes; });
  EXPECT_EQ(failures, 1);
  EXPECT_EQ(successes, 1);
}

TEST(MockCoverageProperty, MockOutputCoversEveryWord) {
  std::mt19937_64 rng(43);
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) {
    std::string w;
    for (int k = 0; k < 2 + i % 6; ++k) w.push_back(static_cast<char>('a' + rng() % 26));
    words.push_back(w + std::to_string(i));
  }
  VocabTable vocab(words);
  for (int t = 0; t < 50; ++t) {
    TrackBow track{"T" + std::to_string(t), "", {}};
    const auto n = 1 + rng() % 40;
    while (track.counts.size() < n) track.counts[1 + rng() % words.size()] = 1 + rng() % 9;
    const auto text = mock_generate(build_prompt(record_with(track.track_id, ordered_vocabulary(track, vocab))));
    ASSERT_EQ(bow_coverage(segment(text), track, vocab), 1.0);
  }
}

}  // namespace
}  // namespace lyrecon
