#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bashsynth/error.hpp"
#include "bashsynth/generator.hpp"

namespace bashsynth {

// Concrete values per generator argument type, e.g. File -> {"temp.txt"}.
using FixtureTable = std::map<GenArgKind, std::vector<std::string>>;

class MissingFixture : public Error {
 public:
  explicit MissingFixture(GenArgKind kind)
      : Error("no fixture value for argument type " + std::string(name_of(kind))), kind_(kind) {}
  GenArgKind kind() const noexcept { return kind_; }

 private:
  GenArgKind kind_;
};

// Replaces every "[Kind]" placeholder. The n-th placeholder of a kind takes
// the n-th fixture value of that kind, wrapping around.
std::string instantiate(const BashAst& template_ast, const FixtureTable& fixtures);
std::string instantiate(const GeneratedCommand& command, const FixtureTable& fixtures);

// Files and directories laid out in every scratch workspace, plus the
// values substituted into templates.
struct FixtureManifest {
  struct Entry {
    std::string path;                    // relative, '/'-separated
    std::optional<std::string> content;  // nullopt: directory
  };
  std::vector<Entry> entries;
  FixtureTable values;

  // {"workspace": [{"path": "abc", "dir": true},
  //                {"path": "temp.txt", "content": "..."}],
  //  "values": {"File": ["temp.txt"], "Directory": ["abc"]}}
  static FixtureManifest load(const std::filesystem::path& path);
  static FixtureManifest from_json_text(std::string_view text);

  // Creates the entries under `root`. Throws SandboxSetupError.
  void materialize(const std::filesystem::path& root) const;
};

enum class Backend { Subprocess, DryRun };

struct SandboxConfig {
  std::filesystem::path workspace_root;  // scratch area; batches live beneath it
  FixtureManifest manifest;
  std::chrono::milliseconds timeout{500};
  std::map<std::string, std::string> env = default_env();
  Backend backend = Backend::DryRun;
  // Real execution must be requested explicitly on top of Backend::Subprocess.
  bool allow_exec = false;
  std::size_t jobs = 1;
  std::set<std::string> allowed_network_utilities;

  static std::map<std::string, std::string> default_env();
};

enum class ExitKind { Exited, Timeout, SpawnFail, Refused };

struct ValidationResult {
  std::string command;
  ExitKind kind = ExitKind::Exited;
  int exit_status = 0;     // meaningful when kind == Exited
  double wall_time = 0.0;  // seconds
  bool valid = false;
  std::string note;        // refusal reason or spawn error

  // "0", "1", ..., or "TIMEOUT" / "SPAWN_FAIL" / "REFUSED".
  std::string exit_status_text() const;
};

// {"command": ..., "exit_status": 0 | "TIMEOUT" | ..., "wall_time": s, "verdict": "valid"}
std::string to_jsonl_line(const ValidationResult& result);
ValidationResult validation_from_jsonl_line(std::string_view line, std::size_t line_no);

// Reason the command must not be executed outside a VM, if any: recursive
// deletion of the root, device writes, fork bombs, privilege escalation,
// network utilities not allow-listed, and mutating utilities pointed at
// absolute or parent paths.
std::optional<std::string> safety_violation(std::string_view command,
                                            const std::set<std::string>& allowed_network = {});

// Runs each command in a fresh copy of the fixture workspace, serially or
// with `jobs` workers, and returns results in input order. The dry-run
// backend only checks that commands parse. Throws SafetyError when the
// subprocess backend lacks the opt-in, SandboxSetupError when the workspace
// cannot be provisioned.
std::vector<ValidationResult> run_batch(std::span<const std::string> commands,
                                        const SandboxConfig& config);

struct Rate {
  std::size_t valid = 0;
  std::size_t total = 0;
  double rate() const { return total ? static_cast<double>(valid) / total : 0.0; }
};

struct RateTable {
  std::map<std::string, Rate> per_utility;  // keyed by head utility
  Rate overall;
};

RateTable validity_rate(std::span<const ValidationResult> results);

}  // namespace bashsynth
