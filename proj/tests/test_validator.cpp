#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include "bashsynth/validator.hpp"
#include "doctest.h"

using namespace bashsynth;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

FixtureManifest manifest() {
  return FixtureManifest::load(std::string(BASHSYNTH_DATA_DIR) + "/fixtures/sandbox.json");
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("bashsynth_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SandboxConfig exec_config(const fs::path& root) {
  SandboxConfig c;
  c.workspace_root = root;
  c.manifest = manifest();
  c.backend = Backend::Subprocess;
  c.allow_exec = true;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    std::string content;
    if (e.is_regular_file()) {
      std::ifstream in(e.path());
      content.assign(std::istreambuf_iterator<char>(in), {});
    }
    out[fs::relative(e.path(), dir).string()] = content;
  }
  return out;
}

}  // namespace

TEST_SUITE("validator") {
  TEST_CASE("instantiate examples") {
    FixtureTable t = {{GenArgKind::Directory, {"abc"}}, {GenArgKind::File, {"temp.txt"}}};
    CHECK(instantiate(parse("cd [Directory]"), t) == "cd abc");
    CHECK(instantiate(parse("cat [File]"), t) == "cat temp.txt");
    try {
      instantiate(parse("grep [Pattern] [File]"), t);
      FAIL("expected MissingFixture");
    } catch (const MissingFixture& e) {
      CHECK(e.kind() == GenArgKind::Pattern);
    }
  }

  TEST_CASE("instantiate is round-robin per kind and deterministic") {
    FixtureTable t = {{GenArgKind::File, {"a.txt", "b.txt"}}};
    auto ast = parse("diff [File] [File] | cat [File]");
    CHECK(instantiate(ast, t) == "diff a.txt b.txt | cat a.txt");
    CHECK(instantiate(ast, t) == instantiate(ast, t));
  }

  TEST_CASE("fixture manifest") {
    auto m = manifest();
    CHECK(m.values.count(GenArgKind::File));
    for (auto k : kAllGenArgKinds) CHECK(m.values.count(k));
    auto root = scratch("materialize");
    m.materialize(root / "ws");
    CHECK(fs::is_regular_file(root / "ws/temp.txt"));
    CHECK(fs::is_directory(root / "ws/abc"));
    CHECK(fs::is_regular_file(root / "ws/abc/def/nested.txt"));
    fs::remove_all(root);

    CHECK_THROWS_AS(FixtureManifest::from_json_text(R"({"workspace": [{"path": "/etc/x"}]})"),
                    SchemaError);
    CHECK_THROWS_AS(FixtureManifest::from_json_text(R"({"workspace": [{"path": "../x"}]})"),
                    SchemaError);
    CHECK_THROWS_AS(FixtureManifest::from_json_text(R"({"values": {"Widget": ["x"]}})"),
                    SchemaError);
  }

  TEST_CASE("safety screen") {
    for (const char* bad : {"rm -rf /", "rm -rf /*", "rm -rf --no-preserve-root /", ":(){ :|:& };:",
                            "dd if=/dev/zero of=/dev/sda", "mkfs.ext4 /dev/sda1", "sudo ls",
                            "su root", "shutdown -h now", "reboot", "curl http://example.com",
                            "find . | xargs wget", "ls | xargs -n 1 curl", "rm -rf ~",
                            "cp a.txt /etc/passwd", "mv a.txt ../a.txt", "echo x > /etc/motd",
                            "chmod -R 777 /", "find / -delete", "cd / ", "ssh host"}) {
      CAPTURE(bad);
      CHECK(safety_violation(bad).has_value());
    }
    for (const char* ok : {"ls -la", "cat temp.txt", "grep -r foo .", "rm -rf abc",
                           "find . -name '*.txt' -delete", "echo hi > out.txt", "ls > /dev/null",
                           "cp a.txt abc/", "grep -w su temp.txt", "du -sh /usr",
                           "find . -type f | xargs rm -f"}) {
      CAPTURE(ok);
      CHECK_FALSE(safety_violation(ok).has_value());
    }
    CHECK_FALSE(safety_violation("curl http://example.com", {"curl"}).has_value());
  }

  TEST_CASE("dry run checks parsing only") {
    std::vector<std::string> cmds = {"ls", "rm -rf /", "echo 'open", "ls | wc -l"};
    SandboxConfig c;
    auto r = run_batch(cmds, c);
    REQUIRE(r.size() == 4);
    CHECK(r[0].valid);
    CHECK(r[1].valid);
    CHECK_FALSE(r[2].valid);
    CHECK(r[3].valid);
    auto rate = validity_rate(std::vector<ValidationResult>{r[0], r[1], r[3]});
    CHECK(rate.overall.rate() == 1.0);
  }

  TEST_CASE("subprocess backend needs the explicit opt-in") {
    SandboxConfig c;
    c.backend = Backend::Subprocess;
    c.workspace_root = fs::temp_directory_path();
    std::vector<std::string> cmds = {"ls"};
    CHECK_THROWS_AS(run_batch(cmds, c), SafetyError);
  }

  TEST_CASE("subprocess verdicts") {
    auto root = scratch("exec");
    auto c = exec_config(root);
    std::vector<std::string> cmds = {"ls", "cat no_such_file", "sleep 5", "cat temp.txt",
                                     "rm -rf /", "definitely_not_a_utility_xyz", "ls abc/def"};
    auto start = std::chrono::steady_clock::now();
    auto r = run_batch(cmds, c);
    auto elapsed = std::chrono::steady_clock::now() - start;
    REQUIRE(r.size() == cmds.size());

    CHECK(r[0].valid);
    CHECK(r[0].exit_status == 0);
    CHECK_FALSE(r[1].valid);
    CHECK(r[1].kind == ExitKind::Exited);
    CHECK(r[1].exit_status != 0);
    CHECK_FALSE(r[2].valid);
    CHECK(r[2].kind == ExitKind::Timeout);
    CHECK(r[2].exit_status_text() == "TIMEOUT");
    CHECK(r[2].wall_time >= 0.5);
    CHECK(r[3].valid);
    CHECK(r[4].kind == ExitKind::Refused);
    CHECK_FALSE(r[4].valid);
    CHECK_FALSE(r[5].valid);
    CHECK(r[5].exit_status == 127);
    CHECK(r[6].valid);
    CHECK(elapsed < 4s);  // the sleeping process was killed
    CHECK(fs::is_empty(root));
    fs::remove_all(root);
  }

  TEST_CASE("workspace isolation and fresh copies") {
    auto root = scratch("iso");
    auto sentinel = scratch("sentinel");
    std::ofstream(sentinel / "keep.txt") << "untouched\n";
    auto before = snapshot(sentinel);

    auto c = exec_config(root / "ws");
    c.jobs = 4;
    const std::string s = sentinel.string();
    std::vector<std::string> cmds = {
        "rm -f temp.txt", "cat temp.txt", "touch " + s + "/evil.txt", "echo x > " + s + "/keep.txt",
        "chmod 000 abc", "mkdir -p deep/er", "cp a.txt ../../escape.txt", "rm -rf abc",
        "ls abc", "find . -name nested.txt | grep nested"};
    auto r = run_batch(cmds, c);
    CHECK(r[0].valid);
    CHECK(r[1].valid);  // fresh copy: the file deleted by command 0 is back
    CHECK(r[2].kind == ExitKind::Refused);
    CHECK(r[3].kind == ExitKind::Refused);
    CHECK(r[4].valid);
    CHECK(r[6].kind == ExitKind::Refused);
    CHECK(r[8].valid);
    CHECK(r[9].valid);

    CHECK(snapshot(sentinel) == before);
    CHECK(fs::is_empty(root / "ws"));
    fs::remove_all(root);
    fs::remove_all(sentinel);
  }

  TEST_CASE("parallel and serial runs agree") {
    auto root = scratch("par");
    std::vector<std::string> cmds;
    for (int i = 0; i < 24; ++i) cmds.push_back(i % 3 ? "ls -l" : "cat missing_" + std::to_string(i));
    auto serial = exec_config(root);
    auto parallel = exec_config(root);
    parallel.jobs = 6;
    auto a = run_batch(cmds, serial);
    auto b = run_batch(cmds, parallel);
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      CHECK(a[i].command == b[i].command);
      CHECK(a[i].valid == b[i].valid);
    }
    fs::remove_all(root);
  }

  TEST_CASE("validation results round trip through JSON lines") {
    ValidationResult a{"ls", ExitKind::Exited, 0, 0.01, true, ""};
    ValidationResult b{"sleep 5", ExitKind::Timeout, 0, 0.5, false, ""};
    ValidationResult c{"rm -rf /", ExitKind::Refused, 0, 0.0, false, "recursive deletion"};
    for (const auto& r : {a, b, c}) {
      auto back = validation_from_jsonl_line(to_jsonl_line(r), 1);
      CHECK(back.command == r.command);
      CHECK(back.kind == r.kind);
      CHECK(back.valid == r.valid);
      CHECK(back.wall_time == r.wall_time);
      CHECK(back.note == r.note);
    }
    CHECK(to_jsonl_line(b).find("\"TIMEOUT\"") != std::string::npos);
    CHECK_THROWS_AS(validation_from_jsonl_line("{}", 3), FormatError);
  }

  TEST_CASE("validity rate") {
    std::vector<ValidationResult> r;
    for (int i = 0; i < 10; ++i) r.push_back({"find . -name x", ExitKind::Exited, 0, 0, i < 3, ""});
    r.push_back({"ls", ExitKind::Exited, 0, 0, true, ""});
    auto t = validity_rate(r);
    CHECK(t.per_utility["find"].rate() == doctest::Approx(0.30));
    CHECK(t.per_utility["ls"].rate() == 1.0);
    CHECK(t.overall.valid == 4);
    CHECK(t.overall.total == 11);
    CHECK(validity_rate(std::vector<ValidationResult>{}).per_utility.empty());
  }
}
