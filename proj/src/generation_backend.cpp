#include "lyrecon/generation_backend.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <random>
#include <regex>
#include <sstream>
#include <thread>
#include <unistd.h>
#include <vector>

#include "strings.hpp"

namespace lyrecon {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void BackendConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw GenerationError(GenerationError::Code::InvalidConfig, "InvalidConfig: " + what);
  };
  if (model.empty()) fail("model name is empty");
  if (!(decoding.temperature >= 0.0) || !std::isfinite(decoding.temperature)) fail("temperature must be >= 0");
  if (decoding.max_tokens < 1) fail("max tokens must be positive");
  if (!(timeout_seconds > 0.0)) fail("timeout must be positive");
  if (max_attempts < 1) fail("max attempts must be >= 1");
  if (!(base_backoff_seconds >= 0.0)) fail("backoff must be >= 0");
  if (max_in_flight < 1) fail("max in-flight must be >= 1");
}

std::string_view to_string(GenerationError::Code code) {
  switch (code) {
    case GenerationError::Code::BackendUnavailable: return "BackendUnavailable";
    case GenerationError::Code::AuthMissing: return "AuthMissing";
    case GenerationError::Code::EmptyCompletion: return "EmptyCompletion";
    case GenerationError::Code::InvalidConfig: return "InvalidConfig";
  }
  return "GenerationError";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

std::string cache_key(std::string_view prompt_text, std::string_view model, const DecodingParams& decoding) {
  // Serialized as JSON so field boundaries are unambiguous.
  json key;
  key["prompt"] = prompt_text;
  key["model"] = model;
  key["temperature"] = decoding.temperature;
  key["max_tokens"] = decoding.max_tokens;
  return sha256_hex(key.dump());
}

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::vector<std::string> split_vocabulary(const std::string& joined) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start <= joined.size()) {
    auto pos = joined.find(", ", start);
    auto word = joined.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!word.empty()) words.push_back(std::move(word));
    if (pos == std::string::npos) break;
    start = pos + 2;
  }
  return words;
}

}  // namespace

std::string mock_generate(const Prompt& prompt) {
  const auto words = split_vocabulary(prompt.fields.vocabulary);
  if (words.empty()) throw PromptError(PromptError::Code::EmptyVocabulary, "EmptyVocabulary: nothing to write about");

  // mt19937_64's output sequence is fixed by the standard; distributions are not,
  // so draw with plain modulo.
  std::mt19937_64 rng(fnv1a(prompt.text));
  auto draw = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  std::vector<std::string> lines;
  for (std::size_t i = 0; i < words.size();) {
    const auto take = std::min<std::size_t>(draw(3, 7), words.size() - i);
    std::string line;
    for (std::size_t j = 0; j < take; ++j) {
      if (j) line.push_back(' ');
      line += words[i + j];
    }
    lines.push_back(std::move(line));
    i += take;
  }

  std::vector<std::vector<std::string>> verses;
  for (std::size_t i = 0; i < lines.size(); i += 4) {
    verses.emplace_back(lines.begin() + static_cast<std::ptrdiff_t>(i),
                        lines.begin() + static_cast<std::ptrdiff_t>(std::min(i + 4, lines.size())));
  }

  std::vector<std::string> chorus;
  {
    const std::size_t hook = std::min<std::size_t>(3, words.size());
    std::string line;
    for (std::size_t j = 0; j < hook; ++j) {
      if (j) line.push_back(' ');
      line += words[j];
    }
    chorus.push_back(line);
    chorus.push_back(line + " " + words[draw(0, words.size() - 1)]);
  }

  std::string out;
  auto emit = [&](const std::vector<std::string>& block) {
    if (!out.empty()) out += "\n";
    for (const auto& line : block) out += line + "\n";
  };
  emit(verses.front());
  emit(chorus);
  for (std::size_t v = 1; v < verses.size(); ++v) emit(verses[v]);
  if (verses.size() > 1) emit(chorus);
  out.pop_back();  // no trailing newline
  return out;
}

std::string MockBackend::complete(const Prompt& prompt, const BackendConfig&) { return mock_generate(prompt); }

// ---------------------------------------------------------------------------
// Chat-completion backend
// ---------------------------------------------------------------------------

std::unique_ptr<ChatCompletionBackend> ChatCompletionBackend::from_environment() {
  const char* key = std::getenv(kApiKeyEnvVar);
  if (key == nullptr || *key == '\0') {
    throw GenerationError(GenerationError::Code::AuthMissing,
                          std::string("AuthMissing: environment variable ") + kApiKeyEnvVar + " is not set");
  }
  return std::make_unique<ChatCompletionBackend>(key);
}

std::string chat_request_body(const Prompt& prompt, const BackendConfig& config) {
  json body;
  body["model"] = config.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.text}}});
  body["temperature"] = config.decoding.temperature;
  body["max_tokens"] = config.decoding.max_tokens;
  return body.dump();
}

std::string parse_chat_response(const std::string& body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw BackendFailure(false, 200, "response is not JSON");
  try {
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendFailure(false, 200, "response lacks choices[0].message.content");
  }
}

std::string ChatCompletionBackend::complete(const Prompt& prompt, const BackendConfig& config) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(config.endpoint, match, kUrl)) {
    throw BackendFailure(false, 0, "endpoint is not an http(s) URL: " + config.endpoint);
  }
  const std::string base = match[1];
  const std::string path = match[2].matched ? match[2].str() : "/";

  httplib::Client client(base);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto response = client.Post(path, headers, chat_request_body(prompt, config), "application/json");
  if (!response) {
    throw BackendFailure(true, 0, "request failed: " + httplib::to_string(response.error()));
  }
  const int status = response->status;
  if (status == 429 || status >= 500) {
    throw BackendFailure(true, status, "HTTP " + std::to_string(status));
  }
  if (status != 200) throw BackendFailure(false, status, "HTTP " + std::to_string(status) + ": " + response->body);
  return parse_chat_response(response->body);
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

std::string result_to_json(const GenerationResult& result) {
  json j;
  j["track_id"] = result.track_id;
  j["prompt_digest"] = result.prompt_digest;
  j["model"] = result.model;
  j["created_at"] = result.created_at;
  j["lyrics"] = result.lyrics;
  return j.dump();
}

GenerationResult result_from_json(const std::string& text) {
  const json j = json::parse(text);
  GenerationResult result;
  result.track_id = j.at("track_id").get<std::string>();
  result.prompt_digest = j.at("prompt_digest").get<std::string>();
  result.model = j.at("model").get<std::string>();
  result.created_at = j.at("created_at").get<std::string>();
  result.lyrics = j.at("lyrics").get<std::string>();
  return result;
}

ResultCache::ResultCache(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path ResultCache::path_for(const std::string& digest) const { return root_ / digest.substr(0, 2) / digest; }

std::optional<GenerationResult> ResultCache::lookup(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_for(digest), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    auto result = result_from_json(buffer.str());
    if (result.prompt_digest != digest) return std::nullopt;
    result.cached = true;
    result.attempts = 0;
    return result;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entry is treated as a miss
  }
}

void ResultCache::store(const GenerationResult& result) {
  std::lock_guard lock(mutex_);
  const auto target = path_for(result.prompt_digest);
  fs::create_directories(target.parent_path());
  if (fs::exists(target)) return;

  static std::atomic<std::uint64_t> counter{0};
  auto temp = target;
  temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << result_to_json(result);
    if (!out.flush()) throw std::runtime_error("cannot write cache entry " + temp.string());
  }
  // A hard link fails if the target appeared meanwhile, so the first writer wins.
  std::error_code ec;
  fs::create_hard_link(temp, target, ec);
  fs::remove(temp);
  if (ec && !fs::exists(target)) throw std::runtime_error("cannot store cache entry: " + ec.message());
}

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Generator::Generator(Backend& backend, BackendConfig config, ResultCache* cache, GeneratorHooks hooks)
    : backend_(backend), config_(std::move(config)), cache_(cache), hooks_(std::move(hooks)) {
  config_.validate();
  if (!hooks_.sleep) {
    hooks_.sleep = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
  if (!hooks_.clock) hooks_.clock = utc_timestamp_now;
}

std::size_t Generator::backend_calls() const noexcept {
  std::lock_guard lock(stats_mutex_);
  return backend_calls_;
}

GenerationResult Generator::generate(const Prompt& prompt) {
  const auto digest = cache_key(prompt.text, config_.model, config_.decoding);
  if (cache_) {
    if (auto hit = cache_->lookup(digest)) {
      hit->track_id = prompt.track_id;
      return *hit;
    }
  }

  std::string lyrics;
  int attempt = 0;
  while (true) {
    ++attempt;
    {
      std::lock_guard lock(stats_mutex_);
      ++backend_calls_;
    }
    try {
      lyrics = backend_.complete(prompt, config_);
      break;
    } catch (const BackendFailure& failure) {
      if (!failure.transient()) {
        throw GenerationError(GenerationError::Code::BackendUnavailable,
                              "BackendUnavailable: " + std::string(failure.what()));
      }
      if (attempt >= config_.max_attempts) {
        throw GenerationError(GenerationError::Code::BackendUnavailable,
                              "BackendUnavailable after " + std::to_string(attempt) +
                                  " attempts: " + failure.what());
      }
      hooks_.sleep(std::chrono::duration<double>(config_.base_backoff_seconds * std::ldexp(1.0, attempt - 1)));
    }
  }
  if (detail::trim(lyrics).empty()) {
    throw GenerationError(GenerationError::Code::EmptyCompletion, "EmptyCompletion: backend returned blank text");
  }

  GenerationResult result;
  result.track_id = prompt.track_id;
  result.prompt_digest = digest;
  result.lyrics = std::move(lyrics);
  result.model = config_.model;
  result.created_at = hooks_.clock();
  result.cached = false;
  result.attempts = attempt;
  if (cache_) {
    cache_->store(result);
    // Keep whatever the cache holds so concurrent writers agree on one value.
    if (auto stored = cache_->lookup(digest)) {
      result.lyrics = stored->lyrics;
      result.created_at = stored->created_at;
    }
  }
  return result;
}

void Generator::generate_batch(std::span<const Prompt> prompts,
                               const std::function<void(std::size_t, BatchOutcome)>& on_done) {
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr callback_error;
  auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= prompts.size()) return;
      BatchOutcome outcome;
      try {
        outcome.result = generate(prompts[index]);
      } catch (const GenerationError& e) {
        outcome.error = e;
      } catch (const std::exception& e) {
        outcome.error = GenerationError(GenerationError::Code::BackendUnavailable, e.what());
      }
      std::lock_guard lock(callback_mutex);
      if (callback_error) return;
      try {
        on_done(index, std::move(outcome));
      } catch (...) {
        callback_error = std::current_exception();
        next = prompts.size();
        return;
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), prompts.size());
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  threads.clear();  // joins
  if (callback_error) std::rethrow_exception(callback_error);
}

}  // namespace lyrecon
