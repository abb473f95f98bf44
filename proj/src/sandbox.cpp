#include "sandbox.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <vector>

namespace bashsynth::detail {

namespace fs = std::filesystem;

namespace {

// Output files a runaway command may write are capped at this size.
constexpr rlim_t kMaxFileBytes = 64L * 1024 * 1024;

[[noreturn]] void child_exec(const char* command, const char* cwd, char* const* envp, int err_fd) {
  setpgid(0, 0);
  int devnull = open("/dev/null", O_RDWR);
  if (devnull >= 0) {
    dup2(devnull, STDIN_FILENO);
    dup2(devnull, STDOUT_FILENO);
    dup2(devnull, STDERR_FILENO);
    if (devnull > STDERR_FILENO) close(devnull);
  }
  rlimit fsize{kMaxFileBytes, kMaxFileBytes};
  setrlimit(RLIMIT_FSIZE, &fsize);
  rlimit core{0, 0};
  setrlimit(RLIMIT_CORE, &core);

  if (chdir(cwd) != 0) {
    int e = errno;
    (void)!write(err_fd, &e, sizeof e);
    _exit(127);
  }
  const char* argv[] = {"/bin/sh", "-c", command, nullptr};
  execve("/bin/sh", const_cast<char* const*>(argv), envp);
  int e = errno;
  (void)!write(err_fd, &e, sizeof e);
  _exit(127);
}

}  // namespace

ProcessOutcome run_shell(const std::string& command, const fs::path& cwd,
                         const std::map<std::string, std::string>& env,
                         std::chrono::milliseconds timeout) {
  ProcessOutcome outcome;

  // Everything the child touches is prepared before fork.
  std::vector<std::string> env_strings;
  for (const auto& [k, v] : env) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  const std::string cwd_str = cwd.string();

  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    outcome.kind = ExitKind::SpawnFail;
    outcome.error = std::string("pipe: ") + std::strerror(errno);
    return outcome;
  }

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    outcome.kind = ExitKind::SpawnFail;
    outcome.error = std::string("fork: ") + std::strerror(errno);
    return outcome;
  }
  if (pid == 0) {
    close(err_pipe[0]);
    child_exec(command.c_str(), cwd_str.c_str(), envp.data(), err_pipe[1]);
  }
  setpgid(pid, pid);
  close(err_pipe[1]);

  int exec_errno = 0;
  ssize_t n = read(err_pipe[0], &exec_errno, sizeof exec_errno);
  close(err_pipe[0]);

  const auto deadline = start + timeout;
  int status = 0;
  bool exited = false;
  while (true) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      exited = true;
      break;
    }
    if (r < 0 && errno != EINTR) break;
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::microseconds(500));
  }
  const auto stop = std::chrono::steady_clock::now();
  // Background children left in the group are not allowed to linger.
  kill(-pid, SIGKILL);
  if (!exited) {
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }
  outcome.wall_time = std::chrono::duration<double>(stop - start).count();

  if (n == static_cast<ssize_t>(sizeof exec_errno)) {
    outcome.kind = ExitKind::SpawnFail;
    outcome.error = std::string("exec: ") + std::strerror(exec_errno);
  } else if (!exited) {
    outcome.kind = ExitKind::Timeout;
  } else if (WIFEXITED(status)) {
    outcome.kind = ExitKind::Exited;
    outcome.exit_status = WEXITSTATUS(status);
  } else {
    outcome.kind = ExitKind::Exited;
    outcome.exit_status = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }
  return outcome;
}

void force_remove(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(fs::symlink_status(path, ec))) return;
  // Restore owner permissions so directories can be listed and emptied.
  if (fs::is_directory(fs::symlink_status(path, ec))) {
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add, ec);
    for (auto it = fs::recursive_directory_iterator(
             path, fs::directory_options::skip_permission_denied, ec);
         !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (it->is_directory(ec) && !it->is_symlink(ec)) {
        fs::permissions(it->path(), fs::perms::owner_all, fs::perm_options::add, ec);
      }
    }
  }
  fs::remove_all(path, ec);
}

}  // namespace bashsynth::detail
