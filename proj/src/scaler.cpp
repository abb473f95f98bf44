#include "bashsynth/scaler.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bashsynth/error.hpp"
#include "bashsynth/rng.hpp"
#include "json.hpp"

namespace bashsynth {

using nlohmann::json;

void DistributionProfile::check() const {
  double sum = 0.0;
  for (const auto& [utility, fraction] : proportions) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw Error("target fraction for '" + utility + "' is outside [0, 1]");
    }
    sum += fraction;
  }
  if (sum > 1.0 + 1e-9) throw Error("target fractions sum to more than 1");
  if (pipe_fraction && !(*pipe_fraction >= 0.0 && *pipe_fraction <= 1.0)) {
    throw Error("pipe fraction is outside [0, 1]");
  }
}

DistributionProfile DistributionProfile::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed profile: ") + e.what());
  }
  DistributionProfile p;
  if (!j.is_object() || !j.contains("proportions") || !j["proportions"].is_object()) {
    throw Error("profile needs a 'proportions' object");
  }
  for (const auto& [utility, value] : j["proportions"].items()) {
    if (!value.is_number()) throw Error("proportion for '" + utility + "' is not a number");
    p.proportions[utility] = value.get<double>();
  }
  if (j.contains("pipe_fraction") && !j["pipe_fraction"].is_null()) {
    if (!j["pipe_fraction"].is_number()) throw Error("'pipe_fraction' is not a number");
    p.pipe_fraction = j["pipe_fraction"].get<double>();
  }
  p.check();
  return p;
}

DistributionProfile DistributionProfile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string DistributionProfile::to_json_text() const {
  json j;
  j["proportions"] = json::object();
  for (const auto& [u, f] : proportions) j["proportions"][u] = f;
  if (pipe_fraction) j["pipe_fraction"] = *pipe_fraction;
  return j.dump(2);
}

double ScaleResult::realized(const std::string& utility) const {
  if (kept.empty()) return 0.0;
  auto it = counts.find(utility);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / kept.size();
}

ScaleResult scale(std::span<const std::string> pool, const DistributionProfile& profile,
                  std::uint64_t seed, double tolerance, const SyntaxKb* kb) {
  if (pool.empty()) throw EmptyInputError("cannot scale an empty pool");
  profile.check();

  ScaleResult result;
  std::map<std::string, std::vector<std::size_t>> by_utility;
  std::vector<bool> piped(pool.size(), false);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    try {
      auto ast = parse(pool[i], kb);
      by_utility[ast.head_utility()].push_back(i);
      piped[i] = ast.pipe_count() > 0;
    } catch (const ParseError&) {
      ++result.unparseable;
    }
  }
  const std::size_t parsed = pool.size() - result.unparseable;
  if (parsed == 0) throw InfeasibleProfile("no parseable commands in the pool");

  std::vector<std::pair<std::string, double>> constrained;
  for (const auto& [utility, target] : profile.proportions) {
    auto it = by_utility.find(utility);
    if (target > 0.0 && it == by_utility.end()) {
      throw InfeasibleProfile("utility '" + utility + "' has a target but no commands in the pool");
    }
    constrained.emplace_back(utility, target);
  }
  std::vector<std::size_t> free_pool;
  for (const auto& [utility, indices] : by_utility) {
    if (!profile.proportions.count(utility)) {
      free_pool.insert(free_pool.end(), indices.begin(), indices.end());
    }
  }
  std::sort(free_pool.begin(), free_pool.end());

  auto available = [&](const std::string& u) {
    auto it = by_utility.find(u);
    return it == by_utility.end() ? std::size_t{0} : it->second.size();
  };

  std::map<std::string, std::size_t> counts;
  std::size_t free_count = 0;
  std::size_t total = 0;
  for (std::size_t t = parsed; t >= 1 && total == 0; --t) {
    std::size_t assigned = 0;
    bool ok = true;
    std::map<std::string, std::size_t> trial;
    for (const auto& [u, target] : constrained) {
      const auto want = static_cast<std::size_t>(std::llround(static_cast<double>(t) * target));
      if (want > available(u)) {
        ok = false;
        break;
      }
      if (std::abs(static_cast<double>(want) / t - target) > tolerance + 1e-12) {
        ok = false;
        break;
      }
      trial[u] = want;
      assigned += want;
    }
    if (!ok || assigned > t || t - assigned > free_pool.size()) continue;
    counts = std::move(trial);
    free_count = t - assigned;
    total = t;
  }
  if (total == 0) {
    throw InfeasibleProfile("no subset of the pool meets every target within tolerance");
  }

  for (const auto& [u, want] : counts) {
    auto indices = by_utility[u];
    SeededRng rng(derive_seed(seed, u));
    rng.shuffle(indices);
    result.kept.insert(result.kept.end(), indices.begin(),
                       indices.begin() + static_cast<std::ptrdiff_t>(want));
  }
  {
    SeededRng rng(derive_seed(seed, "unconstrained"));
    rng.shuffle(free_pool);
    result.kept.insert(result.kept.end(), free_pool.begin(),
                       free_pool.begin() + static_cast<std::ptrdiff_t>(free_count));
  }
  std::sort(result.kept.begin(), result.kept.end());

  std::size_t piped_kept = 0;
  for (auto i : result.kept) {
    piped_kept += piped[i] ? 1 : 0;
  }
  for (const auto& [utility, indices] : by_utility) {
    for (auto i : indices) {
      if (std::binary_search(result.kept.begin(), result.kept.end(), i)) ++result.counts[utility];
    }
  }
  result.realized_pipe_fraction = static_cast<double>(piped_kept) / result.kept.size();
  return result;
}

std::vector<GeneratedCommand> scale(std::span<const GeneratedCommand> pool,
                                    const DistributionProfile& profile, std::uint64_t seed,
                                    double tolerance) {
  std::vector<std::string> rendered;
  rendered.reserve(pool.size());
  for (const auto& c : pool) rendered.push_back(c.rendered());
  auto result = scale(rendered, profile, seed, tolerance);
  std::vector<GeneratedCommand> out;
  out.reserve(result.kept.size());
  for (auto i : result.kept) out.push_back(pool[i]);
  return out;
}

DistributionProfile profile_of(std::span<const std::string> commands, const SyntaxKb* kb) {
  DistributionProfile p;
  std::map<std::string, std::size_t> heads;
  std::size_t parsed = 0;
  std::size_t piped = 0;
  for (const auto& c : commands) {
    try {
      auto ast = parse(c, kb);
      ++heads[ast.head_utility()];
      piped += ast.pipe_count() > 0 ? 1 : 0;
      ++parsed;
    } catch (const ParseError&) {
    }
  }
  if (parsed == 0) return p;
  for (const auto& [u, n] : heads) p.proportions[u] = static_cast<double>(n) / parsed;
  p.pipe_fraction = static_cast<double>(piped) / parsed;
  return p;
}

}  // namespace bashsynth
