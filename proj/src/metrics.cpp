#include "bashsynth/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "bashsynth/error.hpp"

namespace bashsynth {

namespace {

std::vector<std::string_view> as_set(std::span<const std::string_view> tokens) {
  std::vector<std::string_view> out(tokens.begin(), tokens.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FlagScore score_sorted(const std::vector<std::string_view>& pred,
                       const std::vector<std::string_view>& ref) {
  if (pred.empty() && ref.empty()) return {1.0, 1.0};
  std::size_t common = 0;
  auto p = pred.begin();
  auto r = ref.begin();
  while (p != pred.end() && r != ref.end()) {
    if (*p < *r) {
      ++p;
    } else if (*r < *p) {
      ++r;
    } else {
      ++common;
      ++p;
      ++r;
    }
  }
  const double united = static_cast<double>(pred.size() + ref.size() - common);
  const double n = static_cast<double>(std::max(pred.size(), ref.size()));
  const double raw = (2.0 * static_cast<double>(common) - united) / n;
  return {std::clamp(raw, -1.0, 1.0), raw};
}

}  // namespace

FlagScore flag_score(std::span<const std::string_view> predicted,
                     std::span<const std::string_view> reference) {
  return score_sorted(as_set(predicted), as_set(reference));
}

FlagScore flag_score(const std::set<std::string>& predicted, const std::set<std::string>& reference) {
  std::vector<std::string_view> p(predicted.begin(), predicted.end());
  std::vector<std::string_view> r(reference.begin(), reference.end());
  return score_sorted(p, r);
}

double utility_score(const BashAst& predicted, const BashAst& reference) {
  const std::size_t t = std::max(predicted.stages.size(), reference.stages.size());
  if (t == 0) return 1.0;
  const double weight = 1.0 / static_cast<double>(t);
  double score = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const bool both = i < predicted.stages.size() && i < reference.stages.size();
    if (both && predicted.stages[i].name == reference.stages[i].name) {
      auto pf = predicted.stages[i].flag_tokens();
      auto rf = reference.stages[i].flag_tokens();
      score += weight * 0.5 * (1.0 + flag_score(pf, rf).value);
    } else {
      score -= weight;
    }
  }
  return std::clamp(score, -1.0, 1.0);
}

ScoredPair pair_score(BashAst reference, std::vector<Candidate> candidates) {
  if (candidates.empty()) throw EmptyInputError("pair has no candidate commands");
  ScoredPair pair;
  pair.reference = std::move(reference);
  pair.candidates = std::move(candidates);

  double best = -2.0;
  double weighted_sum = 0.0;
  double weight_total = 0.0;
  for (const auto& c : pair.candidates) {
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
      throw Error("candidate confidence must be within [0, 1]");
    }
    const double s = utility_score(c.command, pair.reference);
    pair.per_candidate.push_back(s);
    best = std::max(best, c.confidence * s);
    weighted_sum += c.confidence * s;
    weight_total += c.confidence;
  }
  if (best > 0.0) {
    pair.final_score = best;
  } else {
    pair.final_score = weight_total > 0.0 ? weighted_sum / weight_total : 0.0;
  }
  return pair;
}

double dataset_accuracy(std::span<const ScoredPair> pairs) {
  if (pairs.empty()) throw EmptyInputError("no scored pairs");
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.final_score;
  return 100.0 * sum / static_cast<double>(pairs.size());
}

}  // namespace bashsynth
