#include <cstdlib>
#include <fstream>
#include <regex>

#include "bashsynth/llm_bridge.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bashsynth {

using nlohmann::json;

HttpTransport::HttpTransport(std::string endpoint, std::string token,
                             std::chrono::milliseconds timeout)
    : token_(std::move(token)), timeout_(timeout) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, url)) throw Error("malformed endpoint URL: " + endpoint);
  base_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
}

std::unique_ptr<HttpTransport> HttpTransport::from_env(const LlmConfig& config) {
  const char* token = std::getenv(config.token_env.c_str());
  if (!token || !*token) throw AuthError("environment variable " + config.token_env + " is not set");
  return std::make_unique<HttpTransport>(config.endpoint, token, config.timeout);
}

LlmResponse HttpTransport::send(const LlmRequest& request) {
  httplib::Client client(base_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(token_);
  auto result = client.Post(path_, request.body(), "application/json");
  if (!result) throw TransportError("request failed: " + httplib::to_string(result.error()));
  return {result->status, result->body};
}

ReplayTransport::ReplayTransport(std::istream& audit_log) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(audit_log, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      int status = j.at("status").get<int>();
      if (status == 0) continue;  // no response was recorded for this attempt
      auto key = std::make_tuple(j.at("task").get<std::string>(), j.at("index").get<std::size_t>(),
                                 j.at("attempt").get<int>());
      responses_[key] = {status, j.at("response").get<std::string>()};
    } catch (const json::exception& e) {
      throw FormatError(std::string("audit log: ") + e.what(), line_no);
    }
  }
}

std::unique_ptr<ReplayTransport> ReplayTransport::open(const std::filesystem::path& audit_log) {
  std::ifstream in(audit_log);
  if (!in) throw Error("cannot open audit log " + audit_log.string());
  return std::make_unique<ReplayTransport>(in);
}

LlmResponse ReplayTransport::send(const LlmRequest& request) {
  auto it = responses_.find({request.task, request.index, request.attempt});
  if (it == responses_.end()) {
    throw TransportError("no recorded response for " + request.task + " #" +
                         std::to_string(request.index) + " attempt " +
                         std::to_string(request.attempt));
  }
  return it->second;
}

std::string to_jsonl_line(const LlmExchange& e) {
  json j;
  j["task"] = e.task;
  j["index"] = e.index;
  j["attempt"] = e.attempt;
  j["request"] = e.request;
  j["status"] = e.status;
  j["response"] = e.response;
  j["latency_ms"] = e.latency_ms;
  return j.dump();
}

}  // namespace bashsynth
