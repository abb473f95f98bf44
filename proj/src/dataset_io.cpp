#include "bashsynth/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "bashsynth/bash_ast.hpp"
#include "bashsynth/error.hpp"
#include "bashsynth/rng.hpp"
#include "json.hpp"

namespace bashsynth {

using nlohmann::json;

std::string_view name_of(RecordSource source) {
  switch (source) {
    case RecordSource::Original: return "original";
    case RecordSource::Generated: return "generated";
    case RecordSource::Llm: return "llm";
  }
  return "original";
}

std::optional<RecordSource> record_source_from_name(std::string_view name) {
  if (name == "original") return RecordSource::Original;
  if (name == "generated") return RecordSource::Generated;
  if (name == "llm") return RecordSource::Llm;
  return std::nullopt;
}

std::string to_jsonl_line(const DatasetRecord& record) {
  json j;
  j["nl"] = record.nl;
  j["cmd"] = record.cmd;
  j["source"] = std::string(name_of(record.source));
  if (record.valid) j["valid"] = *record.valid;
  return j.dump();
}

DatasetRecord from_jsonl_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw FormatError("record is not a JSON object", line_no);

  auto text_field = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing '") + key + "' field", line_no);
    if (!it->is_string()) throw FormatError(std::string("'") + key + "' must be a string", line_no);
    auto value = it->get<std::string>();
    if (value.empty()) throw FormatError(std::string("'") + key + "' is empty", line_no);
    return value;
  };

  DatasetRecord r;
  r.nl = text_field("nl");
  r.cmd = text_field("cmd");
  if (auto it = j.find("source"); it != j.end()) {
    if (!it->is_string()) throw FormatError("'source' must be a string", line_no);
    auto src = record_source_from_name(it->get<std::string>());
    if (!src) throw FormatError("unknown source '" + it->get<std::string>() + "'", line_no);
    r.source = *src;
  }
  if (auto it = j.find("valid"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw FormatError("'valid' must be a boolean", line_no);
    r.valid = it->get<bool>();
  }
  return r;
}

std::vector<DatasetRecord> read_records(std::istream& in, std::vector<MalformedLine>* skipped) {
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(from_jsonl_line(line, line_no));
    } catch (const FormatError& e) {
      if (!skipped) throw;
      skipped->push_back({line_no, e.what()});
    }
  }
  return out;
}

std::vector<DatasetRecord> read_records(const std::filesystem::path& path,
                                        std::vector<MalformedLine>* skipped) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_records(in, skipped);
}

void write_records(std::ostream& out, std::span<const DatasetRecord> records) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

void write_records(const std::filesystem::path& path, std::span<const DatasetRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_records(out, records);
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<DatasetRecord> read_nl2bash(const std::filesystem::path& sentences,
                                        const std::filesystem::path& commands,
                                        RecordSource source) {
  std::ifstream nl_in(sentences, std::ios::binary);
  std::ifstream cm_in(commands, std::ios::binary);
  if (!nl_in) throw Error("cannot open " + sentences.string());
  if (!cm_in) throw Error("cannot open " + commands.string());

  std::vector<DatasetRecord> out;
  std::string nl;
  std::string cm;
  std::size_t line_no = 0;
  while (true) {
    const bool has_nl = static_cast<bool>(std::getline(nl_in, nl));
    const bool has_cm = static_cast<bool>(std::getline(cm_in, cm));
    if (!has_nl && !has_cm) break;
    ++line_no;
    if (has_nl != has_cm) throw FormatError("sentence and command files differ in length", line_no);
    if (!nl.empty() && nl.back() == '\r') nl.pop_back();
    if (!cm.empty() && cm.back() == '\r') cm.pop_back();
    if (nl.empty() || cm.empty()) throw FormatError("empty sentence or command", line_no);
    out.push_back({nl, cm, source, std::nullopt});
  }
  return out;
}

CorpusStats corpus_stats(std::span<const std::string> commands, const SyntaxKb* kb) {
  CorpusStats s;
  s.total = commands.size();
  for (const auto& c : commands) {
    BashAst ast;
    try {
      ast = parse(c, kb);
    } catch (const ParseError&) {
      ++s.unparseable;
      continue;
    }
    if (ast.pipe_count() > 0) {
      ++s.piped;
      s.pipe_total += ast.pipe_count();
    }
    ++s.head_utility_histogram[ast.head_utility()];
    for (const auto& stage : ast.stages) {
      s.utilities.insert(stage.name);
      ++s.flag_count_histogram[stage.flags().size()];
    }
  }
  s.unpiped = s.total - s.piped;
  return s;
}

CorpusStats corpus_stats(std::span<const DatasetRecord> records, const SyntaxKb* kb) {
  std::vector<std::string> commands;
  commands.reserve(records.size());
  for (const auto& r : records) commands.push_back(r.cmd);
  return corpus_stats(commands, kb);
}

std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_records(
    std::span<const DatasetRecord> records, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must be strictly between 0 and 1");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SeededRng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  // The epsilon keeps products such as 100 * 0.29 from flooring one short.
  const auto train_size = static_cast<std::size_t>(
      std::floor(static_cast<double>(records.size()) * fraction + 1e-9));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> out;
  for (auto i : train_idx) out.first.push_back(records[i]);
  for (auto i : test_idx) out.second.push_back(records[i]);
  return out;
}

}  // namespace bashsynth
