#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bashsynth/kinds.hpp"

namespace bashsynth {

// One element of a utility's usage template, e.g. the usage line
// "tar [FLAGS] [Path]" is {Utility, Flags, Positional(Path)}.
struct TemplateSlot {
  enum class Kind { Utility, Flags, Positional };

  Kind kind = Kind::Utility;
  GenArgKind arg = GenArgKind::String;  // meaningful for Positional only

  static TemplateSlot utility() { return {Kind::Utility, GenArgKind::String}; }
  static TemplateSlot flags() { return {Kind::Flags, GenArgKind::String}; }
  static TemplateSlot positional(GenArgKind k) { return {Kind::Positional, k}; }

  // "UTILITY", "FLAGS" or a generator kind name such as "File".
  std::string str() const;
  static std::optional<TemplateSlot> parse(std::string_view text);

  bool operator==(const TemplateSlot& other) const {
    return kind == other.kind && (kind != Kind::Positional || arg == other.arg);
  }
};

struct FlagSpec {
  std::string token;
  std::optional<GenArgKind> arg;

  bool operator==(const FlagSpec&) const = default;
};

struct UtilitySpec {
  std::string name;
  std::vector<TemplateSlot> slots;
  std::vector<FlagSpec> flags;
  std::vector<std::string> pipe_successors;

  const FlagSpec* find_flag(std::string_view token) const;
  std::vector<GenArgKind> positional_kinds() const;
  bool can_pipe_to(std::string_view utility) const;

  bool operator==(const UtilitySpec&) const = default;
};

// Checks the structural invariants (unique flags, dash-prefixed tokens,
// well-formed template). Throws SchemaError tagged with `line`.
void check_spec(const UtilitySpec& spec, std::size_t line = 0);

// Spec files are JSON Lines: one utility document per line,
//   {"name": "tar", "template": ["UTILITY", "FLAGS", "Path"],
//    "flags": [{"token": "-f", "arg": "File"}, {"token": "-c"}],
//    "pipe_successors": []}
// Blank lines and lines starting with '#' are ignored.
std::vector<UtilitySpec> parse_specs(std::string_view text);
std::vector<UtilitySpec> load_specs(const std::filesystem::path& path);
std::string render_specs(std::span<const UtilitySpec> specs);

// Lookup view over a set of specs, used by the parser to decide which flags
// consume an argument and what type positional parameters carry.
class SyntaxKb {
 public:
  SyntaxKb() = default;
  explicit SyntaxKb(std::vector<UtilitySpec> specs);

  // Loads a single spec file, or every *.jsonl file of a directory in name
  // order. Utility names must be unique across all files.
  static SyntaxKb load(const std::filesystem::path& path);

  const UtilitySpec* find(std::string_view utility) const;
  const std::vector<UtilitySpec>& specs() const { return specs_; }
  std::size_t size() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }

  // nullopt: the flag is unknown. Otherwise the argument kind the flag
  // consumes (an inner nullopt meaning it takes none). Clustered short flags
  // such as "-cjf" resolve through their last letter.
  std::optional<std::optional<GenArgKind>> flag_argument(std::string_view utility,
                                                         std::string_view flag) const;

  // Declared kind of the n-th positional parameter. Extra parameters reuse
  // the last positional slot.
  std::optional<GenArgKind> positional_kind(std::string_view utility, std::size_t index) const;

 private:
  std::vector<UtilitySpec> specs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Manual page import. The result is a starting point for a curated spec file,
// not a trusted source.
struct ImportedSpec {
  UtilitySpec spec;
  bool needs_review = false;
  // Flags whose argument type was guessed, and other reviewer hints.
  std::vector<std::string> review_notes;
};

ImportedSpec import_manpage(std::string_view text, std::string_view utility);

}  // namespace bashsynth
