// bashsynth: command-line front end for the dataset pipeline.
//
//   generate -> validate -> scale -> backtranslate -> split -> score / stats
//
// Command files are read either as plain lines or as JSON lines carrying a
// "cmd" (dataset records) or "command" (validation results) field.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "bashsynth/bash_ast.hpp"
#include "bashsynth/dataset_io.hpp"
#include "bashsynth/generator.hpp"
#include "bashsynth/llm_bridge.hpp"
#include "bashsynth/metrics.hpp"
#include "bashsynth/nl_prep.hpp"
#include "bashsynth/scaler.hpp"
#include "bashsynth/syntax_kb.hpp"
#include "bashsynth/validator.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bashsynth;

namespace {

constexpr const char* kRecordSchema =
    R"(expected JSON lines: {"nl": "<sentence>", "cmd": "<command>", "source": "original|generated|llm", "valid": true|false (optional)})";

struct Globals {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string format = "text";
};

void warn(const std::string& msg) { std::cerr << "bashsynth: " << msg << '\n'; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Commands from a file of plain lines or JSON lines. Validation results
// marked invalid are dropped when `valid_only` is set.
std::vector<std::string> read_commands(const fs::path& path, bool valid_only = false) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '{') {
      json j = json::parse(line, nullptr, false);
      if (j.is_object()) {
        if (valid_only) {
          if (j.contains("verdict") && j["verdict"] != "valid") continue;
          if (j.contains("valid") && j["valid"] == false) continue;
        }
        if (j.contains("cmd") && j["cmd"].is_string()) {
          out.push_back(j["cmd"].get<std::string>());
          continue;
        }
        if (j.contains("command") && j["command"].is_string()) {
          out.push_back(j["command"].get<std::string>());
          continue;
        }
        throw FormatError("record has no 'cmd' or 'command' field", line_no);
      }
    }
    out.push_back(line);
  }
  return out;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Sibling provenance file for every artifact written.
void write_manifest(const CLI::App& sub, const Globals& g, const std::vector<fs::path>& inputs,
                    const fs::path& output) {
  json overrides = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    auto results = opt->results();
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    overrides[key] = results.size() == 1 ? json(results.front()) : json(results);
  }
  json m;
  m["subcommand"] = sub.get_name();
  m["inputs"] = json::array();
  for (const auto& p : inputs) m["inputs"].push_back(p.string());
  m["output"] = output.string();
  m["seed"] = g.seed;
  m["jobs"] = g.jobs;
  m["config"] = overrides;
  m["version"] = BASHSYNTH_VERSION;
  m["timestamp"] = utc_timestamp();
  std::ofstream out(output.string() + ".manifest.json");
  out << m.dump(2) << '\n';
}

// Writes to a file when a path is given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void finish(const CLI::App& sub, const Globals& g, const std::vector<fs::path>& inputs,
            const std::string& out) {
  if (!out.empty()) write_manifest(sub, g, inputs, out);
}

std::string percent(double value) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << value << '%';
  return os.str();
}

struct LlmOptions {
  std::string endpoint;
  std::string model;
  std::string token_env;
  std::string replay;
  std::string audit;
  double rpm = -1;
  int retries = -1;
  int timeout_ms = 0;
  std::size_t in_flight = 0;

  void attach(CLI::App* sub) {
    sub->add_option("--endpoint", endpoint, "Chat-completion URL");
    sub->add_option("--model", model, "Model name");
    sub->add_option("--token-env", token_env, "Environment variable holding the bearer token");
    sub->add_option("--replay", replay, "Serve responses from a recorded audit log")
        ->check(CLI::ExistingFile);
    sub->add_option("--audit", audit, "Append every exchange to this JSONL log");
    sub->add_option("--rpm", rpm, "Requests per minute (0: unlimited)");
    sub->add_option("--retries", retries, "Retries per request");
    sub->add_option("--timeout-ms", timeout_ms, "Request timeout");
    sub->add_option("--in-flight", in_flight, "Concurrent requests");
  }

  LlmConfig config() const {
    LlmConfig c;
    if (!endpoint.empty()) c.endpoint = endpoint;
    if (!model.empty()) c.model = model;
    if (!token_env.empty()) c.token_env = token_env;
    if (rpm >= 0) c.requests_per_minute = rpm;
    if (retries >= 0) c.max_retries = retries;
    if (timeout_ms > 0) c.timeout = std::chrono::milliseconds(timeout_ms);
    if (in_flight > 0) c.max_in_flight = in_flight;
    if (!replay.empty()) {
      // Recorded sessions replay at full speed.
      c.requests_per_minute = 0;
      c.backoff = std::chrono::milliseconds(0);
    }
    return c;
  }

  std::shared_ptr<Transport> transport(const LlmConfig& c) const {
    if (!replay.empty()) return ReplayTransport::open(replay);
    return HttpTransport::from_env(c);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NL-to-Bash dataset synthesis and evaluation toolkit", "bashsynth"};
  app.set_version_flag("--version", BASHSYNTH_VERSION);
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flag names");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel workers where supported")->capture_default_str();
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  const std::string data_dir = BASHSYNTH_DATA_DIR;

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize command templates from spec files");
  std::string gen_specs = data_dir + "/specs";
  std::size_t gen_limit = 1000;
  std::size_t pipe_limit = 0;
  std::vector<std::string> gen_utils;
  std::string gen_out;
  gen->add_option("--specs", gen_specs, "Spec file or directory")->capture_default_str();
  gen->add_option("--limit", gen_limit, "Templates per utility")->capture_default_str();
  gen->add_option("--pipe-limit", pipe_limit,
                  "Templates per side of each allowed pipe pair (0: no pipes)")
      ->capture_default_str();
  gen->add_option("--utility", gen_utils, "Restrict to these utilities");
  gen->add_option("--out,-o", gen_out, "Output file (one template per line)");

  // validate
  auto* val = app.add_subcommand("validate", "Instantiate templates and check them");
  std::string val_in, val_out, val_fixtures = data_dir + "/fixtures/sandbox.json", val_ws;
  bool val_exec = false;
  int val_timeout = 500;
  std::vector<std::string> val_net;
  val->add_option("--in,-i", val_in, "Templates or commands")->required()->check(CLI::ExistingFile);
  val->add_option("--out,-o", val_out, "Validation results (JSONL)");
  val->add_option("--fixtures", val_fixtures, "Fixture manifest")->capture_default_str();
  val->add_option("--workspace", val_ws, "Scratch directory for sandboxes");
  val->add_flag("--exec", val_exec,
                "Execute commands for real (also requires BASHSYNTH_ALLOW_EXEC=1)");
  val->add_option("--timeout-ms", val_timeout, "Per-command timeout")->capture_default_str();
  val->add_option("--allow-net", val_net, "Network utilities allowed to run");

  // scale
  auto* sc = app.add_subcommand("scale", "Subsample to a target utility distribution");
  std::string sc_in, sc_out, sc_profile = data_dir + "/profiles/nl2bash_original.json", sc_specs;
  double sc_tol = kDefaultScaleTolerance;
  bool sc_valid_only = false;
  sc->add_option("--in,-i", sc_in, "Commands")->required()->check(CLI::ExistingFile);
  sc->add_option("--out,-o", sc_out, "Kept commands");
  sc->add_option("--profile", sc_profile, "Target distribution")->capture_default_str();
  sc->add_option("--tolerance", sc_tol, "Allowed deviation per utility")->capture_default_str();
  sc->add_option("--specs", sc_specs, "Spec files used while parsing");
  sc->add_flag("--valid-only", sc_valid_only, "Drop commands whose validation failed");

  // backtranslate
  auto* bt = app.add_subcommand("backtranslate", "Describe commands in English via an LLM");
  std::string bt_in, bt_out, bt_source = "generated";
  LlmOptions bt_llm;
  bt->add_option("--in,-i", bt_in, "Commands")->required()->check(CLI::ExistingFile);
  bt->add_option("--out,-o", bt_out, "Dataset records");
  bt->add_option("--source", bt_source, "Record source tag")
      ->check(CLI::IsMember({"original", "generated", "llm"}));
  bt_llm.attach(bt);

  // llm-pipeline
  auto* lp = app.add_subcommand("llm-pipeline", "Generate, filter and back-translate via an LLM");
  std::size_t lp_n = 10;
  std::string lp_out;
  LlmOptions lp_llm;
  lp->add_option("-n,--count", lp_n, "Generation prompts")->capture_default_str();
  lp->add_option("--out,-o", lp_out, "Dataset records");
  lp_llm.attach(lp);

  // split
  auto* sp = app.add_subcommand("split", "Seeded train/test split of dataset records");
  std::string sp_in, sp_train, sp_test;
  double sp_fraction = 0.8;
  sp->add_option("--in,-i", sp_in, "Dataset records")->required()->check(CLI::ExistingFile);
  sp->add_option("--train", sp_train, "Training side")->required();
  sp->add_option("--test", sp_test, "Test side")->required();
  sp->add_option("--fraction", sp_fraction, "Training fraction")->capture_default_str();

  // score
  auto* so = app.add_subcommand("score", "Score predictions against references");
  std::string so_ref, so_pred, so_specs;
  so->add_option("--ref", so_ref, "Reference records")->required()->check(CLI::ExistingFile);
  so->add_option("--pred", so_pred, "Predicted records, paired by line")
      ->required()
      ->check(CLI::ExistingFile);
  so->add_option("--specs", so_specs, "Spec files used while parsing");

  // stats
  auto* st = app.add_subcommand("stats", "Corpus statistics");
  std::string st_in, st_specs;
  st->add_option("--in,-i", st_in, "Records or command lines")->required()->check(CLI::ExistingFile);
  st->add_option("--specs", st_specs, "Spec files used while parsing");

  // templatize
  auto* tp = app.add_subcommand("templatize", "Replace parameters with typed placeholders");
  std::string tp_in, tp_out, tp_specs;
  std::vector<std::string> tp_cmds;
  tp->add_option("command", tp_cmds, "Commands to templatize");
  tp->add_option("--in,-i", tp_in, "Command file")->check(CLI::ExistingFile);
  tp->add_option("--out,-o", tp_out, "Output file");
  tp->add_option("--specs", tp_specs, "Spec files used while parsing");

  // fill
  auto* fl = app.add_subcommand("fill", "Fill a template with values mentioned in a sentence");
  std::string fl_template, fl_nl;
  fl->add_option("template", fl_template, "Templatized command")->required();
  fl->add_option("--nl", fl_nl, "Sentence to take values from")->required();

  // import-man
  auto* im = app.add_subcommand("import-man", "Draft a spec from a manual page");
  std::string im_man, im_utility, im_out;
  im->add_option("--man", im_man, "Plain-text manual page")->required()->check(CLI::ExistingFile);
  im->add_option("--utility", im_utility, "Utility name")->required();
  im->add_option("--out,-o", im_out, "Spec file (JSONL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto load_kb = [](const std::string& path) -> std::optional<SyntaxKb> {
    if (path.empty()) return std::nullopt;
    return SyntaxKb::load(path);
  };

  try {
    if (gen->parsed()) {
      SyntaxKb kb = SyntaxKb::load(gen_specs);
      std::set<std::string> only(gen_utils.begin(), gen_utils.end());
      auto wanted = [&](const std::string& u) { return only.empty() || only.count(u); };
      for (const auto& u : only) {
        if (!kb.find(u)) throw SpecError("no spec for utility '" + u + "'");
      }
      std::vector<GeneratedCommand> all;
      for (const auto& spec : kb.specs()) {
        if (!wanted(spec.name)) continue;
        auto part = generate_unpiped(spec, gen_limit, g.seed);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      }
      if (pipe_limit > 0) {
        for (const auto& head : kb.specs()) {
          if (!wanted(head.name)) continue;
          for (const auto& succ : head.pipe_successors) {
            const UtilitySpec* tail = kb.find(succ);
            if (!tail) continue;
            for_each_piped(head, *tail, pipe_limit, pipe_limit, g.seed,
                           [&](GeneratedCommand&& c) { all.push_back(std::move(c)); });
          }
        }
      }
      auto unique = dedup(std::move(all));
      Sink sink(gen_out);
      for (const auto& c : unique.items) sink.stream() << c.rendered() << '\n';
      if (g.format == "json") {
        std::cerr << json{{"templates", unique.items.size()}, {"duplicates", unique.duplicates}}.dump()
                  << '\n';
      } else {
        std::cerr << unique.items.size() << " templates (" << unique.duplicates
                  << " duplicates removed)\n";
      }
      finish(*gen, g, {gen_specs}, gen_out);
    } else if (val->parsed()) {
      SandboxConfig config;
      if (val_exec) {
        const char* opt_in = std::getenv("BASHSYNTH_ALLOW_EXEC");
        if (!opt_in || std::string(opt_in) != "1") {
          warn("refusing to execute commands: --exec also requires BASHSYNTH_ALLOW_EXEC=1 in the "
               "environment. Run only inside a disposable VM or container.");
          return 3;
        }
        config.backend = Backend::Subprocess;
        config.allow_exec = true;
      }
      config.manifest = FixtureManifest::load(val_fixtures);
      config.timeout = std::chrono::milliseconds(val_timeout);
      config.jobs = g.jobs;
      config.allowed_network_utilities = {val_net.begin(), val_net.end()};
      fs::path tmp_root;
      if (val_ws.empty()) {
        tmp_root = fs::temp_directory_path() / ("bashsynth-" + std::to_string(::getpid()));
        config.workspace_root = tmp_root;
      } else {
        config.workspace_root = val_ws;
      }

      std::vector<std::string> commands;
      for (const auto& line : read_commands(val_in)) {
        try {
          commands.push_back(instantiate(parse(line), config.manifest.values));
        } catch (const ParseError&) {
          commands.push_back(line);  // reported as invalid by the batch
        }
      }
      auto results = run_batch(commands, config);
      if (!tmp_root.empty()) fs::remove_all(tmp_root);

      Sink sink(val_out);
      for (const auto& r : results) sink.stream() << to_jsonl_line(r) << '\n';
      auto table = validity_rate(results);
      std::ostream& report = val_out.empty() ? std::cerr : std::cout;
      if (g.format == "json") {
        json j;
        j["overall"] = {{"valid", table.overall.valid}, {"total", table.overall.total}};
        for (const auto& [u, r] : table.per_utility) {
          j["per_utility"][u] = {{"valid", r.valid}, {"total", r.total}};
        }
        report << j.dump() << '\n';
      } else {
        report << "valid " << table.overall.valid << "/" << table.overall.total << " ("
               << percent(100.0 * table.overall.rate()) << ")"
               << (val_exec ? "" : " [dry run: parse check only]") << '\n';
        for (const auto& [u, r] : table.per_utility) {
          report << "  " << u << " " << r.valid << "/" << r.total << '\n';
        }
      }
      finish(*val, g, {val_in, val_fixtures}, val_out);
    } else if (sc->parsed()) {
      auto kb = load_kb(sc_specs);
      auto profile = DistributionProfile::load(sc_profile);
      auto pool = read_commands(sc_in, sc_valid_only);
      auto result = scale(pool, profile, g.seed, sc_tol, kb ? &*kb : nullptr);
      Sink sink(sc_out);
      for (auto i : result.kept) sink.stream() << pool[i] << '\n';
      std::ostream& report = sc_out.empty() ? std::cerr : std::cout;
      if (g.format == "json") {
        json j;
        j["kept"] = result.kept.size();
        j["pool"] = pool.size();
        j["unparseable"] = result.unparseable;
        for (const auto& [u, target] : profile.proportions) {
          j["utilities"][u] = {{"target", target}, {"realized", result.realized(u)}};
        }
        j["pipe_fraction"] = result.realized_pipe_fraction;
        report << j.dump() << '\n';
      } else {
        report << "kept " << result.kept.size() << " of " << pool.size() << " ("
               << result.unparseable << " unparseable)\n";
        for (const auto& [u, target] : profile.proportions) {
          report << "  " << u << " target " << percent(100 * target) << " realized "
                 << percent(100 * result.realized(u)) << '\n';
        }
      }
      finish(*sc, g, {sc_in, sc_profile}, sc_out);
    } else if (bt->parsed()) {
      auto config = bt_llm.config();
      std::ofstream audit;
      if (!bt_llm.audit.empty()) audit.open(bt_llm.audit, std::ios::app);
      LlmClient client(config, bt_llm.transport(config), audit.is_open() ? &audit : nullptr);
      auto commands = read_commands(bt_in, true);
      auto source = *record_source_from_name(bt_source);
      Sink sink(bt_out);
      std::size_t failed = 0;
      for (std::size_t i = 0; i < commands.size(); ++i) {
        try {
          DatasetRecord r{client.backtranslate(commands[i], i), commands[i], source, std::nullopt};
          sink.stream() << to_jsonl_line(r) << '\n';
        } catch (const TransportError& e) {
          ++failed;
          warn("skipping command " + std::to_string(i) + ": " + e.what());
        }
      }
      if (failed) warn(std::to_string(failed) + " commands could not be translated");
      finish(*bt, g, {bt_in}, bt_out);
    } else if (lp->parsed()) {
      auto config = lp_llm.config();
      std::ofstream audit;
      if (!lp_llm.audit.empty()) audit.open(lp_llm.audit, std::ios::app);
      LlmClient client(config, lp_llm.transport(config), audit.is_open() ? &audit : nullptr);
      Sink sink(lp_out);
      auto records = client.pipeline(lp_n, &sink.stream());
      std::cerr << records.size() << " records from " << lp_n << " prompts\n";
      finish(*lp, g, {}, lp_out);
    } else if (sp->parsed()) {
      auto records = read_records(fs::path(sp_in));
      auto [train, test] = split_records(records, sp_fraction, g.seed);
      write_records(fs::path(sp_train), train);
      write_records(fs::path(sp_test), test);
      std::cerr << train.size() << " train, " << test.size() << " test\n";
      finish(*sp, g, {sp_in}, sp_train);
      finish(*sp, g, {sp_in}, sp_test);
    } else if (so->parsed()) {
      auto kb = load_kb(so_specs);
      const SyntaxKb* kbp = kb ? &*kb : nullptr;
      auto refs = read_records(fs::path(so_ref));
      auto preds = read_records(fs::path(so_pred));
      if (refs.size() != preds.size()) {
        throw Error("reference and prediction files differ in length (" +
                    std::to_string(refs.size()) + " vs " + std::to_string(preds.size()) + ")");
      }
      std::vector<ScoredPair> pairs;
      std::size_t unparseable = 0;
      for (std::size_t i = 0; i < refs.size(); ++i) {
        BashAst ref = parse(refs[i].cmd, kbp);
        try {
          pairs.push_back(pair_score(ref, {Candidate{parse(preds[i].cmd, kbp), 1.0}}));
        } catch (const ParseError&) {
          // An unparseable prediction matches no utility.
          ++unparseable;
          ScoredPair p{ref, {}, {-1.0}, -1.0};
          pairs.push_back(std::move(p));
        }
      }
      double acc = dataset_accuracy(pairs);
      if (g.format == "json") {
        std::cout << json{{"accuracy", acc}, {"pairs", pairs.size()}, {"unparseable_predictions", unparseable}}.dump()
                  << '\n';
      } else {
        std::cout << percent(acc) << '\n';
      }
    } else if (st->parsed()) {
      auto kb = load_kb(st_specs);
      const SyntaxKb* kbp = kb ? &*kb : nullptr;
      auto commands = read_commands(st_in);
      auto s = corpus_stats(commands, kbp);
      std::vector<BashAst> parsed;
      for (const auto& c : commands) {
        try {
          parsed.push_back(parse(c, kbp));
        } catch (const ParseError&) {
        }
      }
      std::size_t vocab_raw = 0, vocab_tmpl = 0;
      if (!parsed.empty()) {
        vocab_raw = vocabulary(parsed, false).size();
        vocab_tmpl = vocabulary(parsed, true).size();
      }
      if (g.format == "json") {
        json j;
        j["total"] = s.total;
        j["unparseable"] = s.unparseable;
        j["piped"] = s.piped;
        j["unpiped"] = s.unpiped;
        j["pipe_fraction"] = s.pipe_fraction();
        j["mean_pipes_per_piped"] = s.mean_pipes_per_piped();
        j["distinct_utilities"] = s.utilities.size();
        j["head_utilities"] = s.head_utility_histogram;
        json flags = json::object();
        for (const auto& [k, v] : s.flag_count_histogram) flags[std::to_string(k)] = v;
        j["flags_per_utility"] = flags;
        j["vocabulary"] = {{"raw", vocab_raw}, {"templatized", vocab_tmpl}};
        std::cout << j.dump() << '\n';
      } else {
        std::cout << "commands            " << s.total << '\n'
                  << "unparseable         " << s.unparseable << '\n'
                  << "piped               " << s.piped << " (" << percent(100 * s.pipe_fraction())
                  << ")\n"
                  << "unpiped             " << s.unpiped << '\n'
                  << "pipes per piped     " << std::fixed << std::setprecision(2)
                  << s.mean_pipes_per_piped() << '\n'
                  << "distinct utilities  " << s.utilities.size() << '\n'
                  << "vocabulary          " << vocab_raw << " raw, " << vocab_tmpl
                  << " templatized\n";
        std::vector<std::pair<std::size_t, std::string>> heads;
        for (const auto& [u, n] : s.head_utility_histogram) heads.emplace_back(n, u);
        std::sort(heads.begin(), heads.end(),
                  [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
        std::cout << "head utilities\n";
        for (std::size_t i = 0; i < heads.size() && i < 15; ++i) {
          std::cout << "  " << std::left << std::setw(16) << heads[i].second << heads[i].first << '\n';
        }
      }
    } else if (tp->parsed()) {
      auto kb = load_kb(tp_specs);
      const SyntaxKb* kbp = kb ? &*kb : nullptr;
      std::vector<std::string> commands = tp_cmds;
      if (!tp_in.empty()) {
        auto more = read_commands(tp_in);
        commands.insert(commands.end(), more.begin(), more.end());
      }
      if (commands.empty()) throw Error("templatize needs commands or --in");
      Sink sink(tp_out);
      for (const auto& c : commands) sink.stream() << render(templatize(parse(c, kbp))) << '\n';
      if (!tp_in.empty()) finish(*tp, g, {tp_in}, tp_out);
    } else if (fl->parsed()) {
      auto values = extract_params(fl_nl);
      auto result = fill(parse(fl_template), values);
      std::cout << result.command << '\n';
      if (result.unfilled) warn(std::to_string(result.unfilled) + " placeholders left unfilled");
    } else if (im->parsed()) {
      auto imported = import_manpage(read_file(im_man), im_utility);
      std::vector<UtilitySpec> specs{imported.spec};
      Sink sink(im_out);
      sink.stream() << render_specs(specs);
      for (const auto& note : imported.review_notes) warn("review: " + note);
      if (imported.needs_review) warn("spec needs manual review before use");
      finish(*im, g, {im_man}, im_out);
    }
  } catch (const FormatError& e) {
    warn(e.what());
    warn(kRecordSchema);
    return 2;
  } catch (const SchemaError& e) {
    warn(e.what());
    warn(R"(spec lines look like {"name": "tar", "template": ["UTILITY", "FLAGS", "Path"], "flags": [{"token": "-f", "arg": "File"}], "pipe_successors": []})");
    return 2;
  } catch (const SafetyError& e) {
    warn(e.what());
    return 3;
  } catch (const std::exception& e) {
    warn(e.what());
    return 1;
  }
  return 0;
}
