#include "bashsynth/validator.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sandbox.hpp"

namespace bashsynth {

namespace fs = std::filesystem;
using nlohmann::json;

std::string instantiate(const BashAst& template_ast, const FixtureTable& fixtures) {
  const std::string rendered = render(template_ast);
  static const std::regex placeholder(R"(\[([A-Za-z]+)\])");
  std::map<GenArgKind, std::size_t> used;
  std::string out;
  auto last = rendered.cbegin();
  for (auto it = std::sregex_iterator(rendered.begin(), rendered.end(), placeholder);
       it != std::sregex_iterator(); ++it) {
    auto kind = gen_kind_from_name((*it)[1].str());
    if (!kind) continue;
    auto values = fixtures.find(*kind);
    if (values == fixtures.end() || values->second.empty()) throw MissingFixture(*kind);
    std::size_t& n = used[*kind];
    out.append(last, (*it)[0].first);
    out += values->second[n % values->second.size()];
    ++n;
    last = (*it)[0].second;
  }
  out.append(last, rendered.cend());
  return out;
}

std::string instantiate(const GeneratedCommand& command, const FixtureTable& fixtures) {
  return instantiate(command.template_ast, fixtures);
}

FixtureManifest FixtureManifest::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(e.what(), 0, "");
  }
  if (!j.is_object()) throw SchemaError("fixture manifest must be an object", 0, "");
  FixtureManifest m;
  if (j.contains("workspace")) {
    const auto& ws = j.at("workspace");
    if (!ws.is_array()) throw SchemaError("must be an array", 0, "workspace");
    for (const auto& e : ws) {
      if (!e.is_object() || !e.contains("path") || !e.at("path").is_string()) {
        throw SchemaError("entry needs a string path", 0, "workspace");
      }
      Entry entry{e.at("path").get<std::string>(), std::nullopt};
      fs::path p(entry.path);
      if (entry.path.empty() || p.is_absolute() ||
          std::any_of(p.begin(), p.end(), [](const fs::path& c) { return c == ".."; })) {
        throw SchemaError("path must be relative and stay inside the workspace", 0, "path");
      }
      bool dir = e.value("dir", false);
      if (!dir) entry.content = e.value("content", std::string{});
      m.entries.push_back(std::move(entry));
    }
  }
  if (j.contains("values")) {
    const auto& vals = j.at("values");
    if (!vals.is_object()) throw SchemaError("must be an object", 0, "values");
    for (const auto& [name, list] : vals.items()) {
      auto kind = gen_kind_from_name(name);
      if (!kind) throw SchemaError("unknown argument type", 0, name);
      if (!list.is_array()) throw SchemaError("must be an array of strings", 0, name);
      auto& out = m.values[*kind];
      for (const auto& v : list) {
        if (!v.is_string()) throw SchemaError("must be an array of strings", 0, name);
        out.push_back(v.get<std::string>());
      }
    }
  }
  return m;
}

FixtureManifest FixtureManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SandboxSetupError("cannot open fixture manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void FixtureManifest::materialize(const fs::path& root) const {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw SandboxSetupError("cannot create " + root.string() + ": " + ec.message());
  for (const auto& e : entries) {
    fs::path target = root / e.path;
    if (!e.content) {
      fs::create_directories(target, ec);
      if (ec) throw SandboxSetupError("cannot create " + target.string() + ": " + ec.message());
      continue;
    }
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    std::ofstream out(target, std::ios::binary);
    out << *e.content;
    if (!out) throw SandboxSetupError("cannot write " + target.string());
  }
}

std::map<std::string, std::string> SandboxConfig::default_env() {
  return {{"PATH", "/usr/local/bin:/usr/bin:/bin"}, {"LC_ALL", "C"}, {"LANG", "C"}};
}

std::string ValidationResult::exit_status_text() const {
  switch (kind) {
    case ExitKind::Exited: return std::to_string(exit_status);
    case ExitKind::Timeout: return "TIMEOUT";
    case ExitKind::SpawnFail: return "SPAWN_FAIL";
    case ExitKind::Refused: return "REFUSED";
  }
  return "?";
}

std::string to_jsonl_line(const ValidationResult& r) {
  json j;
  j["command"] = r.command;
  if (r.kind == ExitKind::Exited) {
    j["exit_status"] = r.exit_status;
  } else {
    j["exit_status"] = r.exit_status_text();
  }
  j["wall_time"] = r.wall_time;
  j["verdict"] = r.valid ? "valid" : "invalid";
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump();
}

ValidationResult validation_from_jsonl_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(e.what(), line_no);
  }
  if (!j.is_object()) throw FormatError("expected a JSON object", line_no);
  ValidationResult r;
  if (!j.contains("command") || !j["command"].is_string()) {
    throw FormatError("missing command", line_no);
  }
  r.command = j["command"].get<std::string>();
  const auto& status = j.value("exit_status", json());
  if (status.is_number_integer()) {
    r.kind = ExitKind::Exited;
    r.exit_status = status.get<int>();
  } else if (status == "TIMEOUT") {
    r.kind = ExitKind::Timeout;
  } else if (status == "SPAWN_FAIL") {
    r.kind = ExitKind::SpawnFail;
  } else if (status == "REFUSED") {
    r.kind = ExitKind::Refused;
  } else {
    throw FormatError("bad exit_status", line_no);
  }
  if (!j.contains("wall_time") || !j["wall_time"].is_number()) {
    throw FormatError("missing wall_time", line_no);
  }
  r.wall_time = j["wall_time"].get<double>();
  const auto verdict = j.value("verdict", std::string{});
  if (verdict != "valid" && verdict != "invalid") throw FormatError("bad verdict", line_no);
  r.valid = verdict == "valid";
  r.note = j.value("note", std::string{});
  return r;
}

namespace {

struct Word {
  std::string text;
  bool command_position = false;
};

// Rough shell word splitter for the safety screen. It errs on the side of
// treating words as commands.
std::vector<Word> screen_words(std::string_view command) {
  std::vector<Word> words;
  std::string cur;
  bool have = false;
  bool next_is_command = true;
  char quote = 0;
  auto flush = [&] {
    if (!have) return;
    words.push_back({cur, next_is_command});
    next_is_command = false;
    cur.clear();
    have = false;
  };
  auto separator = [&] {
    flush();
    next_is_command = true;
  };
  for (std::size_t i = 0; i < command.size(); ++i) {
    char c = command[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      have = true;
      continue;
    }
    if (c == '\\' && i + 1 < command.size()) {
      cur += command[++i];
      have = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (c == '|' || c == ';' || c == '&' || c == '(' || c == ')' || c == '`' || c == '{' ||
        c == '}' || c == '\n') {
      separator();
      continue;
    }
    if (c == '$' && i + 1 < command.size() && command[i + 1] == '(') {
      separator();
      ++i;
      continue;
    }
    if (c == '>' || c == '<') {
      flush();
      std::string op(1, c);
      while (i + 1 < command.size() && (command[i + 1] == '>' || command[i + 1] == '&')) {
        op += command[++i];
      }
      words.push_back({op, false});
      continue;
    }
    cur += c;
    have = true;
  }
  flush();

  // Wrappers that run their operand as a command.
  static const std::set<std::string> kWrappers = {
      "xargs", "env", "nice", "nohup", "timeout", "time", "exec", "command", "builtin",
      "stdbuf", "watch", "sh", "bash", "-exec", "-execdir", "-ok", "-okdir"};
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!kWrappers.count(words[i].text)) continue;
    if (!words[i].command_position && words[i].text.front() != '-') continue;
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      const auto& t = words[j].text;
      if (t.empty() || t.front() == '-' || t.find('=') != std::string::npos ||
          std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit((unsigned char)ch) || ch == '.' || ch == 's'; })) {
        continue;
      }
      words[j].command_position = true;
      break;
    }
  }
  return words;
}

std::string basename_of(const std::string& word) {
  auto slash = word.rfind('/');
  return slash == std::string::npos ? word : word.substr(slash + 1);
}

bool escapes_workspace(const std::string& arg) {
  if (arg.empty()) return false;
  std::string value = arg;
  // --target=/x and of=/dev/x style operands.
  auto eq = value.find('=');
  if (value.front() == '-' && eq != std::string::npos) value = value.substr(eq + 1);
  if (value.empty()) return false;
  if (value == "/dev/null") return false;
  if (value.front() == '/' || value.front() == '~' || value.front() == '$') return true;
  fs::path p(value);
  return std::any_of(p.begin(), p.end(), [](const fs::path& c) { return c == ".."; });
}

}  // namespace

std::optional<std::string> safety_violation(std::string_view command,
                                            const std::set<std::string>& allowed_network) {
  static const std::regex fork_bomb(R"(([A-Za-z_:][A-Za-z0-9_:]*)\s*\(\)\s*\{[^}]*\1\s*\|\s*\1)");
  std::string text(command);
  if (std::regex_search(text, fork_bomb)) return "fork bomb";

  static const std::set<std::string> kPrivileged = {"sudo", "su", "doas", "pkexec", "chroot"};
  static const std::set<std::string> kSystem = {
      "shutdown", "reboot", "halt", "poweroff", "init", "telinit", "systemctl", "mount",
      "umount", "fdisk", "parted", "mkswap", "swapon", "swapoff", "insmod", "rmmod",
      "modprobe", "kill", "killall", "pkill", "crontab", "iptables", "useradd", "userdel",
      "passwd"};
  static const std::set<std::string> kNetwork = {
      "curl", "wget", "ssh", "scp", "sftp", "rsync", "nc", "ncat", "netcat", "telnet", "ftp",
      "ping", "socat", "nmap", "dig", "nslookup", "host", "git", "apt", "apt-get", "pip",
      "npm", "yum", "dnf", "lynx", "aria2c"};
  static const std::set<std::string> kMutating = {
      "rm",    "rmdir", "mv",    "cp",       "ln",    "chmod",  "chown", "chgrp",
      "touch", "mkdir", "dd",    "truncate", "tee",   "shred",  "install", "unlink",
      "tar",   "zip",   "unzip", "gzip",     "gunzip", "bzip2", "xz",    "split",
      "rsync", "sed",   "cd",    "pushd",    "find",  "mkfifo", "patch", "cpio"};

  auto words = screen_words(command);
  std::string current;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (w.command_position) {
      current = basename_of(w.text);
      if (kPrivileged.count(current)) return "privilege escalation via " + current;
      if (kSystem.count(current)) return "system administration utility " + current;
      if (current.rfind("mkfs", 0) == 0) return "filesystem creation";
      if (kNetwork.count(current) && !allowed_network.count(current)) {
        return "network utility " + current + " is not allow-listed";
      }
      continue;
    }
    if (w.text == ">" || w.text == ">>" || w.text == ">|" || w.text == "&>" || w.text == ">&") {
      if (i + 1 < words.size() && escapes_workspace(words[i + 1].text)) {
        return "redirect outside the workspace: " + words[i + 1].text;
      }
      ++i;
      continue;
    }
    if (w.text == "<") {
      ++i;
      continue;
    }
    if (current == "dd" && w.text.rfind("of=", 0) == 0) {
      std::string target = w.text.substr(3);
      if (target.rfind("/dev/", 0) == 0 && target != "/dev/null") return "raw device write";
    }
    if (current == "rm" && (w.text == "/" || w.text == "/*" || w.text == "--no-preserve-root")) {
      return "recursive deletion of the root";
    }
    if (kMutating.count(current) && escapes_workspace(w.text)) {
      return current + " given a path outside the workspace: " + w.text;
    }
  }
  return std::nullopt;
}

namespace {

ValidationResult dry_run(const std::string& command) {
  ValidationResult r;
  r.command = command;
  try {
    (void)parse(command);
    r.kind = ExitKind::Exited;
    r.exit_status = 0;
    r.valid = true;
  } catch (const ParseError& e) {
    r.kind = ExitKind::Exited;
    r.exit_status = 2;
    r.note = e.what();
  }
  return r;
}

ValidationResult execute(const std::string& command, const SandboxConfig& config,
                         const fs::path& workspace) {
  ValidationResult r;
  r.command = command;
  if (auto reason = safety_violation(command, config.allowed_network_utilities)) {
    r.kind = ExitKind::Refused;
    r.note = *reason;
    return r;
  }
  try {
    (void)parse(command);
  } catch (const ParseError& e) {
    r.kind = ExitKind::Refused;
    r.note = std::string("unparseable: ") + e.what();
    return r;
  }

  config.manifest.materialize(workspace);
  auto env = config.env;
  env["HOME"] = workspace.string();
  env["TMPDIR"] = workspace.string();
  env["PWD"] = workspace.string();
  auto outcome = detail::run_shell(command, workspace, env, config.timeout);
  detail::force_remove(workspace);

  r.kind = outcome.kind;
  r.exit_status = outcome.exit_status;
  r.wall_time = outcome.wall_time;
  r.note = outcome.error;
  const double limit = std::chrono::duration<double>(config.timeout).count();
  r.valid = r.kind == ExitKind::Exited && r.exit_status == 0 && r.wall_time <= limit;
  return r;
}

std::atomic<std::uint64_t> g_batch_counter{0};

}  // namespace

std::vector<ValidationResult> run_batch(std::span<const std::string> commands,
                                        const SandboxConfig& config) {
  std::vector<ValidationResult> results(commands.size());
  if (config.backend == Backend::DryRun) {
    for (std::size_t i = 0; i < commands.size(); ++i) results[i] = dry_run(commands[i]);
    return results;
  }
  if (!config.allow_exec) {
    throw SafetyError("real execution is disabled; it must be enabled explicitly");
  }
  if (config.workspace_root.empty()) throw SandboxSetupError("no workspace root configured");

  std::ostringstream name;
  name << "batch-" << ::getpid() << "-" << g_batch_counter++;
  const fs::path batch_dir = config.workspace_root / name.str();
  std::error_code ec;
  fs::create_directories(batch_dir, ec);
  if (ec) throw SandboxSetupError("cannot create " + batch_dir.string() + ": " + ec.message());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t i = next++;
      if (i >= commands.size()) return;
      try {
        results[i] = execute(commands[i], config, batch_dir / std::to_string(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = commands.size();
        return;
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, commands.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  detail::force_remove(batch_dir);
  if (failure) std::rethrow_exception(failure);
  return results;
}

RateTable validity_rate(std::span<const ValidationResult> results) {
  RateTable table;
  for (const auto& r : results) {
    std::string head;
    try {
      head = parse(r.command).head_utility();
    } catch (const ParseError&) {
      std::istringstream in(r.command);
      in >> head;
    }
    auto& rate = table.per_utility[head];
    ++rate.total;
    ++table.overall.total;
    if (r.valid) {
      ++rate.valid;
      ++table.overall.valid;
    }
  }
  return table;
}

}  // namespace bashsynth
