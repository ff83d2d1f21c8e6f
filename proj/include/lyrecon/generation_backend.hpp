#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "lyrecon/prompt_builder.hpp"

namespace lyrecon {

inline constexpr const char* kApiKeyEnvVar = "LYRECON_API_KEY";

struct DecodingParams {
  double temperature = 0.7;
  int max_tokens = 1024;

  bool operator==(const DecodingParams&) const = default;
};

struct BackendConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  DecodingParams decoding;
  double timeout_seconds = 120.0;
  int max_attempts = 5;
  double base_backoff_seconds = 1.0;
  int max_in_flight = 4;

  // Throws GenerationError(InvalidConfig).
  void validate() const;
};

class GenerationError : public std::runtime_error {
 public:
  enum class Code { BackendUnavailable, AuthMissing, EmptyCompletion, InvalidConfig };

  GenerationError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

std::string_view to_string(GenerationError::Code code);

// Raised by backends. Transient failures (rate limits, 5xx, network errors)
// are retried by Generator; others fail the request immediately.
class BackendFailure : public std::runtime_error {
 public:
  BackendFailure(bool transient, int http_status, const std::string& what)
      : std::runtime_error(what), transient_(transient), status_(http_status) {}
  bool transient() const noexcept { return transient_; }
  int http_status() const noexcept { return status_; }

 private:
  bool transient_;
  int status_;
};

struct GenerationResult {
  std::string track_id;
  std::string prompt_digest;  // 64 hex chars
  std::string lyrics;
  std::string model;
  std::string created_at;  // ISO 8601 UTC
  bool cached = false;
  int attempts = 0;  // backend calls spent; 0 for cache hits
};

// SHA-256 over prompt text, model and decoding parameters, hex encoded.
std::string cache_key(std::string_view prompt_text, std::string_view model, const DecodingParams& decoding);

std::string sha256_hex(std::string_view data);

// Offline stand-in for a language model: every vocabulary word appears at
// least once and the text has at least two blank-line separated sections.
std::string mock_generate(const Prompt& prompt);

class Backend {
 public:
  virtual ~Backend() = default;
  // Returns the completion text; throws BackendFailure.
  virtual std::string complete(const Prompt& prompt, const BackendConfig& config) = 0;
};

class MockBackend : public Backend {
 public:
  std::string complete(const Prompt& prompt, const BackendConfig& config) override;
};

// Chat-completion style JSON over HTTP(S):
//   {"model": ..., "messages": [{"role": "user", "content": <prompt>}],
//    "temperature": ..., "max_tokens": ...}
// and reads choices[0].message.content from the response.
class ChatCompletionBackend : public Backend {
 public:
  explicit ChatCompletionBackend(std::string api_key) : api_key_(std::move(api_key)) {}

  // Reads the key from LYRECON_API_KEY; throws GenerationError(AuthMissing).
  static std::unique_ptr<ChatCompletionBackend> from_environment();

  std::string complete(const Prompt& prompt, const BackendConfig& config) override;

 private:
  std::string api_key_;
};

std::string chat_request_body(const Prompt& prompt, const BackendConfig& config);
// Throws BackendFailure(non-transient) when the body has no usable content.
std::string parse_chat_response(const std::string& body);

// One file per digest at <root>/<digest[0:2]>/<digest>, holding the result as JSON.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path root);

  std::optional<GenerationResult> lookup(const std::string& digest) const;
  // The first stored result for a digest is kept; later stores are no-ops.
  void store(const GenerationResult& result);

  std::filesystem::path path_for(const std::string& digest) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

std::string result_to_json(const GenerationResult& result);
GenerationResult result_from_json(const std::string& text);

std::string utc_timestamp_now();

struct GeneratorHooks {
  std::function<void(std::chrono::duration<double>)> sleep;  // default: this_thread::sleep_for
  std::function<std::string()> clock;                          // default: utc_timestamp_now
};

struct BatchOutcome {
  std::optional<GenerationResult> result;
  std::optional<GenerationError> error;
};

class Generator {
 public:
  // cache may be null.
  Generator(Backend& backend, BackendConfig config, ResultCache* cache, GeneratorHooks hooks = {});

  GenerationResult generate(const Prompt& prompt);

  // Runs up to config.max_in_flight requests at once. on_done is called once
  // per prompt, serialized, in completion order.
  void generate_batch(std::span<const Prompt> prompts,
                      const std::function<void(std::size_t index, BatchOutcome outcome)>& on_done);

  std::size_t backend_calls() const noexcept;
  const BackendConfig& config() const noexcept { return config_; }

 private:
  Backend& backend_;
  BackendConfig config_;
  ResultCache* cache_;
  GeneratorHooks hooks_;
  mutable std::mutex stats_mutex_;
  std::size_t backend_calls_ = 0;
};

}  // namespace lyrecon
