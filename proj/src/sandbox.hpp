#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

#include "bashsynth/validator.hpp"

namespace bashsynth::detail {

struct ProcessOutcome {
  ExitKind kind = ExitKind::Exited;
  int exit_status = 0;
  double wall_time = 0.0;
  std::string error;
};

// Runs `/bin/sh -c command` in its own process group with `cwd` as working
// directory, exactly `env` as environment, stdin/stdout/stderr on /dev/null.
// The whole group is killed at the deadline.
ProcessOutcome run_shell(const std::string& command, const std::filesystem::path& cwd,
                         const std::map<std::string, std::string>& env,
                         std::chrono::milliseconds timeout);

// Removes a tree even when a command stripped permissions inside it.
void force_remove(const std::filesystem::path& path);

}  // namespace bashsynth::detail
