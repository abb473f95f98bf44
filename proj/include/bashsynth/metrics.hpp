#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bashsynth/bash_ast.hpp"

namespace bashsynth {

// Flag score of one aligned utility pair:
//   raw = (2 * |pred ∩ ref| - |pred ∪ ref|) / max(|pred|, |ref|)
// Disjoint sets of unequal size give raw < -1 (e.g. -2 for {-a} vs {-b}),
// so `value` is raw clamped to [-1, 1]; `raw` is kept for diagnostics.
// Two empty sets score 1.
struct FlagScore {
  double value = 1.0;
  double raw = 1.0;
};

// Inputs are treated as sets; repeated tokens count once.
FlagScore flag_score(std::span<const std::string_view> predicted,
                     std::span<const std::string_view> reference);
FlagScore flag_score(const std::set<std::string>& predicted, const std::set<std::string>& reference);

// Utility score over positionally aligned pipeline stages. With
// T = max(#stages): a matching utility adds (1/T) * (1 + S_F) / 2, a
// mismatch or missing stage adds -1/T.
double utility_score(const BashAst& predicted, const BashAst& reference);

struct Candidate {
  BashAst command;
  double confidence = 1.0;
};

struct ScoredPair {
  BashAst reference;
  std::vector<Candidate> candidates;
  std::vector<double> per_candidate;  // utility score of each candidate
  double final_score = 0.0;
};

// Final score: the best confidence-weighted score when it is positive,
// otherwise the confidence-weighted mean of the candidate scores.
ScoredPair pair_score(BashAst reference, std::vector<Candidate> candidates);

// Mean final score as a percentage in [-100, 100]. Throws EmptyInputError.
double dataset_accuracy(std::span<const ScoredPair> pairs);

}  // namespace bashsynth
