#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bashsynth/dataset_io.hpp"
#include "bashsynth/error.hpp"

namespace bashsynth {

inline constexpr std::string_view kGenerationPrompt = "Generate bash command and do not include example";
inline constexpr std::string_view kTranslationPrompt = "Translate to English: ";

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string token_env = "OPENAI_API_KEY";  // name of the variable, never the token
  std::string model = "gpt-3.5-turbo";
  double gen_temperature = 1.0;
  double translate_temperature = 0.0;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};  // doubled per retry
  double requests_per_minute = 60.0;       // 0: unlimited
  std::size_t max_in_flight = 4;

  // Throws Error on out-of-range values.
  void check() const;
};

// Requests are identified by task ("gen" or "translate"), the generation
// index they belong to and the attempt number, which is what replay keys on.
struct LlmRequest {
  std::string task;
  std::size_t index = 0;
  int attempt = 0;
  std::string model;
  std::string prompt;
  double temperature = 0.0;

  // Chat-completion body: {"model", "messages": [{"role", "content"}], "temperature"}.
  std::string body() const;
};

struct LlmResponse {
  int status = 0;
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Returns whatever status the endpoint produced; throws TransportError
  // when no response arrived at all.
  virtual LlmResponse send(const LlmRequest& request) = 0;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string token, std::chrono::milliseconds timeout);
  // Reads the bearer token from config.token_env. Throws AuthError if unset.
  static std::unique_ptr<HttpTransport> from_env(const LlmConfig& config);
  LlmResponse send(const LlmRequest& request) override;

 private:
  std::string base_;
  std::string path_;
  std::string token_;
  std::chrono::milliseconds timeout_;
};

// Serves responses from a previously written audit log.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::istream& audit_log);
  static std::unique_ptr<ReplayTransport> open(const std::filesystem::path& audit_log);
  LlmResponse send(const LlmRequest& request) override;

 private:
  std::map<std::tuple<std::string, std::size_t, int>, LlmResponse> responses_;
};

struct LlmExchange {
  std::string task;
  std::size_t index = 0;
  int attempt = 0;
  std::string request;        // wire body
  int status = 0;             // 0 when no response arrived
  std::string response;       // raw body or transport error text
  double latency_ms = 0.0;
};

std::string to_jsonl_line(const LlmExchange& exchange);

class LlmClient {
 public:
  // `audit` receives one JSON line per exchange, including failed attempts.
  LlmClient(LlmConfig config, std::shared_ptr<Transport> transport, std::ostream* audit = nullptr);

  // One normalized command per successful response, in index order.
  // Requests that still fail after retries are skipped.
  std::vector<std::string> gen_commands(std::size_t n);
  // `index` identifies the request in the audit log when translating a batch.
  std::string backtranslate(const std::string& cmd, std::size_t index = 0);

  // Generation, dedup, parse filter, back-translation. Records are written
  // to `out` in generation order as soon as they are complete.
  std::vector<DatasetRecord> pipeline(std::size_t n, std::ostream* out = nullptr);

  const std::vector<LlmExchange>& exchanges() const { return exchanges_; }

 private:
  struct Indexed {
    std::size_t index;
    std::string text;
  };

  std::optional<std::string> call(const std::string& task, std::size_t index,
                                  const std::string& prompt, double temperature);
  std::vector<std::optional<std::string>> run_all(
      std::size_t count, const std::function<std::optional<std::string>(std::size_t)>& job,
      const std::function<void(std::size_t, const std::optional<std::string>&)>& on_done = {});
  std::vector<Indexed> generate_indexed(std::size_t n);
  void acquire_slot();

  LlmConfig config_;
  std::shared_ptr<Transport> transport_;
  std::ostream* audit_;
  std::mutex mutex_;
  std::vector<LlmExchange> exchanges_;
  double bucket_ = 0.0;
  std::chrono::steady_clock::time_point bucket_time_;
};

// First command in a chat response: markdown fences, a leading "$ " prompt
// and inline backticks are removed.
std::string normalize_command(std::string_view response);
// Single-line sentence from a chat response.
std::string normalize_sentence(std::string_view response);

}  // namespace bashsynth
