#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bashsynth/generator.hpp"

namespace bashsynth {

class SyntaxKb;

// Target head-utility proportions. Utilities not listed are unconstrained
// and fill whatever share the listed ones leave.
struct DistributionProfile {
  std::map<std::string, double> proportions;
  std::optional<double> pipe_fraction;

  // Throws Error unless every fraction is in [0, 1] and they sum to <= 1.
  void check() const;

  // {"proportions": {"find": 0.6344}, "pipe_fraction": 0.3136}
  static DistributionProfile load(const std::filesystem::path& path);
  static DistributionProfile from_json_text(std::string_view text);
  std::string to_json_text() const;
};

inline constexpr double kDefaultScaleTolerance = 0.02;

struct ScaleResult {
  std::vector<std::size_t> kept;  // ascending pool indices
  std::size_t unparseable = 0;
  std::map<std::string, std::size_t> counts;  // per head utility, kept only
  double realized_pipe_fraction = 0.0;

  double realized(const std::string& utility) const;
};

// Keeps the largest subset whose constrained utilities each sit within
// `tolerance` of their target. Per-utility counts follow the rule
// count(u) = round(T * target(u)) for the largest total T the pool can
// supply; unparseable commands are dropped first and the commands removed
// from over-represented utilities are chosen by a seeded shuffle.
// Throws InfeasibleProfile when no non-empty subset qualifies.
ScaleResult scale(std::span<const std::string> pool, const DistributionProfile& profile,
                  std::uint64_t seed, double tolerance = kDefaultScaleTolerance,
                  const SyntaxKb* kb = nullptr);

std::vector<GeneratedCommand> scale(std::span<const GeneratedCommand> pool,
                                    const DistributionProfile& profile, std::uint64_t seed,
                                    double tolerance = kDefaultScaleTolerance);

// Realized head-utility proportions and pipe fraction over the parseable
// commands.
DistributionProfile profile_of(std::span<const std::string> commands,
                               const SyntaxKb* kb = nullptr);

}  // namespace bashsynth
