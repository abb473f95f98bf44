#include "bashsynth/generator.hpp"

#include <algorithm>
#include <unordered_set>

#include "bashsynth/error.hpp"
#include "bashsynth/rng.hpp"

namespace bashsynth {

namespace {

ParamNode placeholder_param(GenArgKind kind) {
  ParamNode p;
  p.literal = gen_placeholder_token(kind);
  p.category = to_parser_kind(kind);
  return p;
}

// All index subsets of {0..n-1} with size <= max_size, by size then
// lexicographically.
std::vector<std::vector<std::size_t>> enumerate_subsets(std::size_t n, std::size_t max_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k <= std::min(n, max_size); ++k) {
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      out.push_back(combo);
      // advance to the next combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return out;
}

UtilityNode build_node(const UtilitySpec& spec, const std::vector<const FlagSpec*>& chosen) {
  UtilityNode node;
  node.name = spec.name;
  bool flags_placed = false;
  auto place_flags = [&] {
    for (const FlagSpec* f : chosen) {
      FlagNode flag;
      flag.token = f->token;
      if (f->arg) flag.arg = placeholder_param(*f->arg);
      node.args.emplace_back(std::move(flag));
    }
    flags_placed = true;
  };
  for (const auto& slot : spec.slots) {
    switch (slot.kind) {
      case TemplateSlot::Kind::Utility:
        break;
      case TemplateSlot::Kind::Flags:
        place_flags();
        break;
      case TemplateSlot::Kind::Positional:
        node.args.emplace_back(placeholder_param(slot.arg));
        break;
    }
  }
  if (!flags_placed) {
    // No FLAGS slot: options go right after the utility name.
    std::vector<Argument> positional = std::move(node.args);
    node.args.clear();
    place_flags();
    for (auto& a : positional) node.args.push_back(std::move(a));
  }
  return node;
}

GeneratedCommand make_command(std::vector<UtilityNode> stages, Provenance provenance) {
  GeneratedCommand cmd;
  cmd.template_ast.stages = std::move(stages);
  cmd.template_ast.raw = render(cmd.template_ast);
  cmd.id = to_hex(stable_hash(cmd.template_ast.raw));
  cmd.provenance = std::move(provenance);
  return cmd;
}

}  // namespace

std::uint64_t count_flag_subsets(std::size_t n, std::size_t max_size) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, k)
  for (std::size_t k = 0; k <= std::min(n, max_size); ++k) {
    total += binom;
    binom = binom * (n - k) / (k + 1);
  }
  return total;
}

std::vector<GeneratedCommand> generate_unpiped(const UtilitySpec& spec, std::size_t limit,
                                               std::uint64_t seed) {
  if (spec.slots.empty()) throw SpecError("utility '" + spec.name + "' has no template");
  if (limit == 0) return {};

  std::vector<const FlagSpec*> sorted;
  for (const auto& f : spec.flags) sorted.push_back(&f);
  std::sort(sorted.begin(), sorted.end(),
            [](const FlagSpec* a, const FlagSpec* b) { return a->token < b->token; });

  auto subsets = enumerate_subsets(sorted.size(), kMaxFlagsPerUtility);
  std::vector<std::size_t> picked;
  if (limit >= subsets.size()) {
    picked.resize(subsets.size());
    for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
  } else {
    SeededRng rng(derive_seed(seed, spec.name));
    picked = rng.sample_indices(subsets.size(), limit);
  }

  std::vector<GeneratedCommand> out;
  out.reserve(picked.size());
  for (std::size_t index : picked) {
    std::vector<const FlagSpec*> chosen;
    std::vector<std::string> tokens;
    for (std::size_t i : subsets[index]) {
      chosen.push_back(sorted[i]);
      tokens.push_back(sorted[i]->token);
    }
    Provenance prov{{spec.name}, {std::move(tokens)}, std::nullopt};
    out.push_back(make_command({build_node(spec, chosen)}, std::move(prov)));
  }
  return out;
}

void for_each_piped(const UtilitySpec& head, const UtilitySpec& tail, std::size_t head_limit,
                    std::size_t tail_limit, std::uint64_t seed,
                    const std::function<void(GeneratedCommand&&)>& sink) {
  if (!head.can_pipe_to(tail.name)) {
    throw PipeError("'" + tail.name + "' is not an allowed pipe successor of '" + head.name + "'");
  }
  auto heads = generate_unpiped(head, head_limit, seed);
  auto tails = generate_unpiped(tail, tail_limit, derive_seed(seed, "pipe-tail"));
  for (const auto& h : heads) {
    for (const auto& t : tails) {
      Provenance prov{{head.name, tail.name},
                      {h.provenance.flags.front(), t.provenance.flags.front()},
                      tail.name};
      sink(make_command({h.template_ast.stages.front(), t.template_ast.stages.front()},
                        std::move(prov)));
    }
  }
}

std::vector<GeneratedCommand> generate_piped(const UtilitySpec& head, const UtilitySpec& tail,
                                             std::size_t head_limit, std::size_t tail_limit,
                                             std::uint64_t seed) {
  std::vector<GeneratedCommand> out;
  for_each_piped(head, tail, head_limit, tail_limit, seed,
                 [&](GeneratedCommand&& c) { out.push_back(std::move(c)); });
  return out;
}

Deduped<GeneratedCommand> dedup(std::vector<GeneratedCommand> commands) {
  Deduped<GeneratedCommand> result;
  result.input_size = commands.size();
  std::unordered_set<std::string> seen;
  for (auto& c : commands) {
    if (seen.insert(c.rendered()).second) {
      result.items.push_back(std::move(c));
    } else {
      ++result.duplicates;
    }
  }
  return result;
}

Deduped<std::string> dedup(std::vector<std::string> commands) {
  Deduped<std::string> result;
  result.input_size = commands.size();
  std::unordered_set<std::string> seen;
  for (auto& c : commands) {
    if (seen.insert(c).second) {
      result.items.push_back(std::move(c));
    } else {
      ++result.duplicates;
    }
  }
  return result;
}

}  // namespace bashsynth
