#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bashsynth/bash_ast.hpp"
#include "bashsynth/syntax_kb.hpp"

namespace bashsynth {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kMaxFlagsPerUtility = 3;

struct Provenance {
  std::vector<std::string> utilities;
  std::vector<std::vector<std::string>> flags;  // per utility, in template order
  std::optional<std::string> pipe_partner;

  bool operator==(const Provenance&) const = default;
};

// A synthesized command template. Parameters are generator placeholders
// such as "[File]"; parser_template() converts them to "_FILE" form.
struct GeneratedCommand {
  BashAst template_ast;
  Provenance provenance;
  std::string id;  // stable hash of the rendered template

  std::string rendered() const { return render(template_ast); }
  BashAst parser_template() const { return templatize(template_ast); }
};

// Number of flag subsets of size 0..max_size drawn from n flags.
std::uint64_t count_flag_subsets(std::size_t n, std::size_t max_size = kMaxFlagsPerUtility);

// Flag subsets are enumerated by size, then lexicographically over the
// sorted flag tokens. When limit is below the total, a seeded uniform sample
// without replacement is kept, still in enumeration order.
std::vector<GeneratedCommand> generate_unpiped(const UtilitySpec& spec, std::size_t limit,
                                               std::uint64_t seed);

// Cross product of independently generated head and tail templates joined
// by a single pipe, head-major. Throws PipeError unless tail is an allowed
// successor of head.
std::vector<GeneratedCommand> generate_piped(const UtilitySpec& head, const UtilitySpec& tail,
                                             std::size_t head_limit, std::size_t tail_limit,
                                             std::uint64_t seed);

// Streaming form of generate_piped for very large products that should
// not be held in memory at once.
void for_each_piped(const UtilitySpec& head, const UtilitySpec& tail, std::size_t head_limit,
                    std::size_t tail_limit, std::uint64_t seed,
                    const std::function<void(GeneratedCommand&&)>& sink);

template <typename T>
struct Deduped {
  std::vector<T> items;
  std::size_t duplicates = 0;
  std::size_t input_size = 0;

  double duplicate_rate() const {
    return input_size == 0 ? 0.0 : static_cast<double>(duplicates) / input_size;
  }
};

// Order-preserving removal of repeated rendered templates.
Deduped<GeneratedCommand> dedup(std::vector<GeneratedCommand> commands);
Deduped<std::string> dedup(std::vector<std::string> commands);

}  // namespace bashsynth
