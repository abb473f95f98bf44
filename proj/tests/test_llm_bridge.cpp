#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "bashsynth/bash_ast.hpp"
#include "bashsynth/llm_bridge.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

using namespace bashsynth;
using nlohmann::json;

namespace {

const std::string kStub = std::string(BASHSYNTH_TEST_DATA) + "/llm_stub.jsonl";

LlmConfig fast_config() {
  LlmConfig c;
  c.requests_per_minute = 0;
  c.backoff = std::chrono::milliseconds(1);
  return c;
}

std::string chat_body(const std::string& content) {
  json j = {{"choices", json::array({{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", content}}}}})}};
  return j.dump();
}

std::string run_replay(std::string* audit_text = nullptr) {
  std::ostringstream out, audit;
  LlmClient audited(fast_config(), ReplayTransport::open(kStub), &audit);
  audited.pipeline(10, &out);
  if (audit_text) *audit_text = audit.str();
  return out.str();
}

// Minimal chat-completion endpoint on localhost.
class StubServer {
 public:
  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("llm_bridge") {
  TEST_CASE("response normalization") {
    CHECK(normalize_command("```bash\nls -la\n```") == "ls -la");
    CHECK(normalize_command("$ find . -name \"*.txt\"") == "find . -name \"*.txt\"");
    CHECK(normalize_command("`du -sh /var/log`") == "du -sh /var/log");
    CHECK(normalize_command("  grep -r foo .  \n") == "grep -r foo .");
    CHECK(normalize_command("") == "");
    CHECK(normalize_sentence("  List all files.\n\n") == "List all files.");
    CHECK(normalize_sentence("Line one\nline two") == "Line one line two");
  }

  TEST_CASE("request body") {
    LlmRequest r{"gen", 0, 0, "gpt-3.5-turbo", std::string(kGenerationPrompt), 1.0};
    auto j = json::parse(r.body());
    CHECK(j["model"] == "gpt-3.5-turbo");
    CHECK(j["temperature"] == 1.0);
    CHECK(j["messages"][0]["role"] == "user");
    CHECK(j["messages"][0]["content"] == std::string(kGenerationPrompt));
  }

  TEST_CASE("configuration checks") {
    LlmConfig c;
    CHECK_NOTHROW(c.check());
    c.max_in_flight = 0;
    CHECK_THROWS_AS(c.check(), Error);
    c = LlmConfig{};
    c.translate_temperature = 3.0;
    CHECK_THROWS_AS(c.check(), Error);
  }

  TEST_CASE("the token comes from the environment only") {
    LlmConfig c;
    c.token_env = "BASHSYNTH_TEST_UNSET_TOKEN_VARIABLE";
    ::unsetenv(c.token_env.c_str());
    CHECK_THROWS_AS(HttpTransport::from_env(c), AuthError);
  }

  TEST_CASE("replayed pipeline") {
    std::string audit;
    auto first = run_replay(&audit);
    auto second = run_replay();
    CHECK(first == second);

    std::istringstream in(first);
    auto recs = read_records(in);
    REQUIRE(recs.size() == 5);
    for (const auto& r : recs) {
      CHECK(r.source == RecordSource::Llm);
      CHECK_FALSE(r.valid.has_value());
      CHECK_FALSE(r.nl.empty());
      CHECK_NOTHROW(parse(r.cmd));
    }
    CHECK(recs[0].cmd == "ls -la");
    CHECK(recs[0].nl == "list all files including hidden ones in long format");

    std::set<std::tuple<std::string, std::size_t, int>> seen;
    std::istringstream lines(audit);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
      auto j = json::parse(line);
      seen.insert({j["task"].get<std::string>(), j["index"].get<std::size_t>(), j["attempt"].get<int>()});
      ++count;
    }
    CHECK(count == 16);
    CHECK(seen.size() == 16);
    CHECK(seen.count({"gen", 3, 0}));
    CHECK(seen.count({"gen", 3, 1}));
  }

  TEST_CASE("empty pipeline") {
    LlmClient client(fast_config(), ReplayTransport::open(kStub));
    CHECK(client.pipeline(0).empty());
    CHECK(client.exchanges().empty());
  }

  TEST_CASE("blank command is rejected") {
    LlmClient client(fast_config(), ReplayTransport::open(kStub));
    CHECK_THROWS_AS(client.backtranslate(""), Error);
  }

  TEST_CASE("http transport against a local endpoint") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      CHECK(req.get_header_value("Authorization") == "Bearer test-token");
      auto j = json::parse(req.body);
      std::string prompt = j["messages"][0]["content"];
      if (prompt.rfind(std::string(kTranslationPrompt), 0) == 0)
        res.set_content(chat_body("Lists the directory."), "application/json");
      else
        res.set_content(chat_body("```\nls -l\n```"), "application/json");
    });
    auto c = fast_config();
    auto transport = std::make_shared<HttpTransport>(server.endpoint(), "test-token",
                                                     std::chrono::milliseconds(5000));
    LlmClient client(c, transport);
    auto cmds = client.gen_commands(3);
    CHECK(cmds == std::vector<std::string>{"ls -l", "ls -l", "ls -l"});
    CHECK(client.backtranslate("ls -l") == "Lists the directory.");
    CHECK(hits == 4);
  }

  TEST_CASE("retries server errors and stops on auth failures") {
    std::atomic<int> hits{0};
    StubServer flaky([&](const httplib::Request&, httplib::Response& res) {
      if (hits++ == 0) {
        res.status = 500;
        res.set_content("oops", "text/plain");
      } else {
        res.set_content(chat_body("pwd"), "application/json");
      }
    });
    LlmClient client(fast_config(), std::make_shared<HttpTransport>(
                                        flaky.endpoint(), "t", std::chrono::milliseconds(5000)));
    CHECK(client.gen_commands(1) == std::vector<std::string>{"pwd"});
    CHECK(client.exchanges().size() == 2);
    CHECK(client.exchanges()[0].status == 500);

    StubServer denied([](const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content("{}", "application/json");
    });
    LlmClient rejected(fast_config(), std::make_shared<HttpTransport>(
                                          denied.endpoint(), "t", std::chrono::milliseconds(5000)));
    CHECK_THROWS_AS(rejected.gen_commands(2), AuthError);
  }

  TEST_CASE("unreachable endpoint") {
    auto c = fast_config();
    c.max_retries = 1;
    LlmClient client(c, std::make_shared<HttpTransport>("http://127.0.0.1:1/v1/chat/completions",
                                                        "t", std::chrono::milliseconds(500)));
    CHECK_THROWS_AS(client.gen_commands(2), TransportError);
  }
}
