#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bashsynth {

class SyntaxKb;

enum class RecordSource { Original, Generated, Llm };

std::string_view name_of(RecordSource source);
std::optional<RecordSource> record_source_from_name(std::string_view name);

struct DatasetRecord {
  std::string nl;
  std::string cmd;
  RecordSource source = RecordSource::Original;
  std::optional<bool> valid;

  bool operator==(const DatasetRecord&) const = default;
};

// One JSON object per line: {"nl": ..., "cmd": ..., "source": ..., "valid": ...}.
// "valid" is omitted when unknown.
std::string to_jsonl_line(const DatasetRecord& record);
DatasetRecord from_jsonl_line(std::string_view line, std::size_t line_no);

struct MalformedLine {
  std::size_t line = 0;
  std::string message;
};

// Strict reads throw FormatError on the first malformed line. Passing
// `skipped` switches to lenient mode: bad lines are reported there instead.
std::vector<DatasetRecord> read_records(std::istream& in,
                                        std::vector<MalformedLine>* skipped = nullptr);
std::vector<DatasetRecord> read_records(const std::filesystem::path& path,
                                        std::vector<MalformedLine>* skipped = nullptr);
void write_records(std::ostream& out, std::span<const DatasetRecord> records);
void write_records(const std::filesystem::path& path, std::span<const DatasetRecord> records);

// NL2Bash layout: a sentence file and a command file paired by line number.
std::vector<DatasetRecord> read_nl2bash(const std::filesystem::path& sentences,
                                        const std::filesystem::path& commands,
                                        RecordSource source = RecordSource::Original);

struct CorpusStats {
  std::size_t total = 0;
  std::size_t unparseable = 0;
  // Commands with at least one pipe; unparseable commands count as unpiped.
  std::size_t piped = 0;
  std::size_t unpiped = 0;
  std::size_t pipe_total = 0;  // sum of pipes over piped commands
  std::set<std::string> utilities;  // every stage, nested bodies excluded
  std::map<std::string, std::size_t> head_utility_histogram;
  std::map<std::size_t, std::size_t> flag_count_histogram;  // flags per utility node

  double pipe_fraction() const { return total ? static_cast<double>(piped) / total : 0.0; }
  double mean_pipes_per_piped() const {
    return piped ? static_cast<double>(pipe_total) / piped : 0.0;
  }
};

CorpusStats corpus_stats(std::span<const std::string> commands, const SyntaxKb* kb = nullptr);
CorpusStats corpus_stats(std::span<const DatasetRecord> records, const SyntaxKb* kb = nullptr);

// Seeded shuffle, then the first floor(n * fraction) records go to the
// training side. Each side keeps the input's relative order. Throws
// std::invalid_argument unless 0 < fraction < 1.
std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_records(
    std::span<const DatasetRecord> records, double fraction, std::uint64_t seed);

}  // namespace bashsynth
