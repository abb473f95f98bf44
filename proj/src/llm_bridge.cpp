#include "bashsynth/llm_bridge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "bashsynth/bash_ast.hpp"
#include "json.hpp"

namespace bashsynth {

using nlohmann::json;

void LlmConfig::check() const {
  auto temp_ok = [](double t) { return t >= 0.0 && t <= 2.0; };
  if (!temp_ok(gen_temperature) || !temp_ok(translate_temperature)) {
    throw Error("temperature must lie in [0, 2]");
  }
  if (max_retries < 0) throw Error("max_retries must be non-negative");
  if (max_in_flight == 0) throw Error("max_in_flight must be at least 1");
  if (requests_per_minute < 0) throw Error("requests_per_minute must be non-negative");
  if (timeout.count() <= 0) throw Error("timeout must be positive");
}

std::string LlmRequest::body() const {
  json j;
  j["model"] = model;
  j["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  j["temperature"] = temperature;
  return j.dump();
}

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::optional<std::string> content_of(const std::string& body) {
  try {
    auto j = json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

}  // namespace

std::string normalize_command(std::string_view response) {
  auto lines = lines_of(response);
  // Inside a fenced block only the block body counts.
  auto fence = std::find_if(lines.begin(), lines.end(),
                            [](std::string_view l) { return trim(l).substr(0, 3) == "```"; });
  auto begin = lines.begin();
  auto end = lines.end();
  if (fence != lines.end()) {
    begin = fence + 1;
    end = std::find_if(begin, lines.end(),
                       [](std::string_view l) { return trim(l).substr(0, 3) == "```"; });
  }
  for (auto it = begin; it != end; ++it) {
    std::string_view l = trim(*it);
    if (l.empty()) continue;
    if (l.size() >= 2 && l.front() == '`' && l.back() == '`') {
      l = trim(l.substr(1, l.size() - 2));
    }
    if (l.substr(0, 2) == "$ ") l = trim(l.substr(2));
    if (!l.empty()) return std::string(l);
  }
  return {};
}

std::string normalize_sentence(std::string_view response) {
  std::string out;
  for (auto l : lines_of(response)) {
    auto t = trim(l);
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<Transport> transport, std::ostream* audit)
    : config_(std::move(config)), transport_(std::move(transport)), audit_(audit) {
  config_.check();
  if (!transport_) throw Error("LLM client needs a transport");
  bucket_ = static_cast<double>(config_.max_in_flight);
  bucket_time_ = std::chrono::steady_clock::now();
}

void LlmClient::acquire_slot() {
  if (config_.requests_per_minute <= 0) return;
  const double per_second = config_.requests_per_minute / 60.0;
  const double capacity = static_cast<double>(config_.max_in_flight);
  while (true) {
    double wait_s = 0.0;
    {
      std::lock_guard lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      bucket_ = std::min(capacity, bucket_ + std::chrono::duration<double>(now - bucket_time_).count() * per_second);
      bucket_time_ = now;
      if (bucket_ >= 1.0) {
        bucket_ -= 1.0;
        return;
      }
      wait_s = (1.0 - bucket_) / per_second;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
  }
}

std::optional<std::string> LlmClient::call(const std::string& task, std::size_t index,
                                           const std::string& prompt, double temperature) {
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config_.backoff * (1 << std::min(attempt - 1, 10)));
    }
    acquire_slot();
    LlmRequest request{task, index, attempt, config_.model, prompt, temperature};
    LlmExchange exchange{task, index, attempt, request.body(), 0, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    std::optional<LlmResponse> response;
    try {
      response = transport_->send(request);
    } catch (const TransportError& e) {
      exchange.response = e.what();
    }
    exchange.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (response) {
      exchange.status = response->status;
      exchange.response = response->body;
    }
    {
      std::lock_guard lock(mutex_);
      if (audit_) *audit_ << to_jsonl_line(exchange) << '\n' << std::flush;
      exchanges_.push_back(exchange);
    }
    if (!response) continue;
    const int status = response->status;
    if (status == 401 || status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429 || status >= 500) continue;
    if (status != 200) return std::nullopt;
    if (auto content = content_of(response->body)) return content;
  }
  return std::nullopt;
}

std::vector<std::optional<std::string>> LlmClient::run_all(
    std::size_t count, const std::function<std::optional<std::string>(std::size_t)>& job,
    const std::function<void(std::size_t, const std::optional<std::string>&)>& on_done) {
  std::vector<std::optional<std::string>> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t i = next++;
      if (i >= count) return;
      try {
        results[i] = job(i);
        if (on_done) on_done(i, results[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  const std::size_t workers = std::min(config_.max_in_flight, count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<LlmClient::Indexed> LlmClient::generate_indexed(std::size_t n) {
  const std::string prompt(kGenerationPrompt);
  auto results = run_all(n, [&](std::size_t i) -> std::optional<std::string> {
    auto content = call("gen", i, prompt, config_.gen_temperature);
    if (!content) return std::nullopt;
    auto cmd = normalize_command(*content);
    if (cmd.empty()) return std::nullopt;
    return cmd;
  });
  std::vector<Indexed> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) out.push_back({i, std::move(*results[i])});
  }
  if (n > 0 && out.empty()) throw TransportError("every generation request failed");
  return out;
}

std::vector<std::string> LlmClient::gen_commands(std::size_t n) {
  std::vector<std::string> out;
  for (auto& g : generate_indexed(n)) out.push_back(std::move(g.text));
  return out;
}

std::string LlmClient::backtranslate(const std::string& cmd, std::size_t index) {
  if (trim(cmd).empty()) throw Error("cannot back-translate an empty command");
  auto content = call("translate", index, std::string(kTranslationPrompt) + cmd,
                      config_.translate_temperature);
  if (!content) throw TransportError("back-translation failed after retries");
  return normalize_sentence(*content);
}

std::vector<DatasetRecord> LlmClient::pipeline(std::size_t n, std::ostream* out) {
  if (n == 0) return {};
  auto generated = generate_indexed(n);

  std::set<std::string> seen;
  std::vector<Indexed> survivors;
  for (auto& g : generated) {
    if (!seen.insert(g.text).second) continue;
    try {
      (void)parse(g.text);
    } catch (const ParseError&) {
      continue;
    }
    survivors.push_back(std::move(g));
  }
  if (survivors.empty()) return {};

  std::vector<std::optional<std::optional<std::string>>> done(survivors.size());
  std::size_t next_to_write = 0;
  std::mutex write_mutex;
  auto emit = [&](std::size_t i, const std::optional<std::string>& sentence) {
    std::lock_guard lock(write_mutex);
    done[i] = sentence;
    while (next_to_write < done.size() && done[next_to_write]) {
      const auto& s = *done[next_to_write];
      if (s && out) {
        DatasetRecord r{*s, survivors[next_to_write].text, RecordSource::Llm, std::nullopt};
        *out << to_jsonl_line(r) << '\n' << std::flush;
      }
      ++next_to_write;
    }
  };
  auto sentences = run_all(
      survivors.size(),
      [&](std::size_t i) -> std::optional<std::string> {
        auto content = call("translate", survivors[i].index,
                            std::string(kTranslationPrompt) + survivors[i].text,
                            config_.translate_temperature);
        if (!content) return std::nullopt;
        auto s = normalize_sentence(*content);
        if (s.empty()) return std::nullopt;
        return s;
      },
      emit);

  std::vector<DatasetRecord> records;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (sentences[i]) {
      records.push_back({*sentences[i], survivors[i].text, RecordSource::Llm, std::nullopt});
    }
  }
  if (records.empty()) throw TransportError("every back-translation request failed");
  return records;
}

}  // namespace bashsynth
