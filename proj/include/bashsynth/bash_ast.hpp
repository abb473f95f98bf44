#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bashsynth/kinds.hpp"

namespace bashsynth {

class SyntaxKb;
struct UtilityNode;

// Body of a one-level nested construct: `-exec rm {} \;` or `$(date +%s)`.
struct NestedCommand {
  std::vector<UtilityNode> stages;  // one stage for -exec bodies
  std::string terminator;           // "\\;", ";", "';'", "+" or ")" for $(...)

  bool operator==(const NestedCommand& other) const;
};

struct ParamNode {
  std::string literal;  // as written, quotes included
  PlaceholderKind category = PlaceholderKind::Regex;
  // Tokens that are syntax rather than data, such as "{}" or the command
  // word after xargs; never templatized.
  bool verbatim = false;
  std::optional<NestedCommand> substitution;  // literal "$(...)"

  bool is_placeholder() const;
  bool operator==(const ParamNode& other) const;
};

struct FlagNode {
  std::string token;
  std::optional<ParamNode> arg;
  bool attached = false;  // rendered as --token=arg
  std::optional<NestedCommand> exec_body;

  bool operator==(const FlagNode& other) const;
};

using Argument = std::variant<FlagNode, ParamNode>;

struct UtilityNode {
  std::string name;
  // Flags and parameters in source order; order matters to utilities such
  // as find whose starting points precede the expression.
  std::vector<Argument> args;
  std::optional<ParamNode> redirect;  // `> target`

  std::vector<std::reference_wrapper<const FlagNode>> flags() const;
  std::vector<std::reference_wrapper<const ParamNode>> params() const;
  std::vector<std::string_view> flag_tokens() const;
  // Utilities nested inside -exec bodies and command substitutions.
  std::vector<std::reference_wrapper<const UtilityNode>> nested() const;

  bool operator==(const UtilityNode& other) const;
};

struct BashAst {
  std::vector<UtilityNode> stages;  // pipeline stages, never empty
  std::string raw;

  std::size_t pipe_count() const { return stages.empty() ? 0 : stages.size() - 1; }
  const std::string& head_utility() const { return stages.front().name; }

  // Structural equality; `raw` is ignored.
  bool operator==(const BashAst& other) const { return stages == other.stages; }
};

inline bool NestedCommand::operator==(const NestedCommand& other) const {
  return terminator == other.terminator && stages == other.stages;
}

// Context used to categorize a parameter: the utility it belongs to, the
// flag it follows (if any) and a kind declared by the syntax knowledge base.
struct ArgContext {
  std::string_view utility;
  std::string_view flag;
  std::optional<PlaceholderKind> declared;
};

// Ordered rule list; total and deterministic. Quoted literals are
// categorized by their contents.
PlaceholderKind categorize(std::string_view literal, const ArgContext& context = {});

// Parses a single-line command. With a knowledge base, flags declared to
// take an argument consume the following token and parameters pick up
// declared types. Throws ParseError.
BashAst parse(std::string_view source, const SyntaxKb* kb = nullptr);

// Canonical rendering: tokens joined by single spaces, stages by " | ".
std::string render(const BashAst& ast);
std::string render(const UtilityNode& node);
// The token sequence render() joins, with nested bodies flattened.
std::vector<std::string> tokens(const BashAst& ast);

// Replaces every parameter literal by its placeholder token. Utilities,
// flags and verbatim tokens are untouched. Idempotent.
BashAst templatize(const BashAst& ast);

struct TypedValue {
  PlaceholderKind kind = PlaceholderKind::Regex;
  std::string literal;

  bool operator==(const TypedValue&) const = default;
};

struct FillResult {
  std::string command;
  std::size_t unfilled = 0;
};

// Walks placeholders left to right, consuming the first unused value of the
// matching kind. Placeholders without a value stay in place.
FillResult fill(const BashAst& template_ast, std::span<const TypedValue> values);

// Distinct tokens over a corpus, optionally after templatization. Throws
// EmptyInputError for an empty corpus.
std::set<std::string> vocabulary(std::span<const BashAst> corpus, bool templatized);

}  // namespace bashsynth
