#include <algorithm>
#include <cmath>

#include "bashsynth/error.hpp"
#include "bashsynth/rng.hpp"
#include "bashsynth/scaler.hpp"
#include "doctest.h"

using namespace bashsynth;

namespace {

std::vector<std::string> pool(int finds, int others, const std::string& other = "ls") {
  std::vector<std::string> out;
  for (int i = 0; i < finds; ++i) out.push_back("find . -name f" + std::to_string(i));
  for (int i = 0; i < others; ++i) out.push_back(other + " d" + std::to_string(i));
  return out;
}

}  // namespace

TEST_SUITE("scaler") {
  TEST_CASE("worked example keeps every ls and trims find") {
    auto p = pool(90, 10);
    DistributionProfile prof{{{"find", 0.6344}}, std::nullopt};
    auto r = scale(p, prof, 1);
    CHECK(r.counts["find"] == 18);
    CHECK(r.counts["ls"] == 10);
    CHECK(r.kept.size() == 28);
    CHECK(std::abs(r.realized("find") - 0.6344) <= kDefaultScaleTolerance);
  }

  TEST_CASE("kept indices are an ascending subset") {
    auto p = pool(90, 10);
    DistributionProfile prof{{{"find", 0.6344}}, std::nullopt};
    auto r = scale(p, prof, 5);
    CHECK(std::is_sorted(r.kept.begin(), r.kept.end()));
    CHECK(std::adjacent_find(r.kept.begin(), r.kept.end()) == r.kept.end());
    CHECK(r.kept.back() < p.size());
    for (std::size_t i = 90; i < 100; ++i)
      CHECK(std::binary_search(r.kept.begin(), r.kept.end(), i));
  }

  TEST_CASE("seeded and deterministic") {
    auto p = pool(90, 10);
    DistributionProfile prof{{{"find", 0.6344}}, std::nullopt};
    CHECK(scale(p, prof, 9).kept == scale(p, prof, 9).kept);
    CHECK(scale(p, prof, 9).kept != scale(p, prof, 10).kept);
  }

  TEST_CASE("a profile already met keeps everything") {
    auto p = pool(50, 50);
    DistributionProfile prof{{{"find", 0.5}, {"ls", 0.5}}, std::nullopt};
    auto r = scale(p, prof, 3);
    CHECK(r.kept.size() == 100);
  }

  TEST_CASE("an empty profile is the identity") {
    auto p = pool(7, 3);
    auto r = scale(p, DistributionProfile{}, 3);
    CHECK(r.kept.size() == 10);
  }

  TEST_CASE("boosting a minority utility") {
    auto p = pool(90, 10);
    DistributionProfile prof{{{"ls", 0.5}}, std::nullopt};
    auto r = scale(p, prof, 2);
    CHECK(r.counts["ls"] == 10);
    CHECK(r.counts["find"] == 10);
  }

  TEST_CASE("unparseable commands are dropped") {
    auto p = pool(10, 10);
    p.push_back("echo 'unterminated");
    DistributionProfile prof{{{"find", 0.5}}, std::nullopt};
    auto r = scale(p, prof, 1);
    CHECK(r.unparseable == 1);
    CHECK(r.kept.size() == 20);
  }

  TEST_CASE("infeasible targets") {
    auto p = pool(0, 10);
    DistributionProfile prof{{{"find", 0.6344}}, std::nullopt};
    CHECK_THROWS_AS(scale(p, prof, 1), InfeasibleProfile);
    std::vector<std::string> empty;
    CHECK_THROWS_AS(scale(empty, prof, 1), EmptyInputError);
  }

  TEST_CASE("profile validation") {
    CHECK_THROWS(DistributionProfile{{{"find", 0.7}, {"ls", 0.5}}, std::nullopt}.check());
    CHECK_THROWS(DistributionProfile{{{"find", -0.1}}, std::nullopt}.check());
    auto prof = DistributionProfile::load(std::string(BASHSYNTH_DATA_DIR) +
                                          "/profiles/nl2bash_original.json");
    CHECK(prof.proportions.at("find") == doctest::Approx(0.6344));
    REQUIRE(prof.pipe_fraction);
    CHECK(*prof.pipe_fraction == doctest::Approx(0.3136));
    auto back = DistributionProfile::from_json_text(prof.to_json_text());
    CHECK(back.proportions == prof.proportions);
  }

  TEST_CASE("realized profile") {
    std::vector<std::string> cmds = {"find .", "find / | sort", "ls"};
    auto prof = profile_of(cmds);
    CHECK(prof.proportions.at("find") == doctest::Approx(2.0 / 3));
    CHECK(prof.proportions.at("ls") == doctest::Approx(1.0 / 3));
    REQUIRE(prof.pipe_fraction);
    CHECK(*prof.pipe_fraction == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("tolerance holds across random pools") {
    SeededRng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
      int finds = 100 + static_cast<int>(rng.uniform(400));
      int others = 200 + static_cast<int>(rng.uniform(400));
      double target = 0.05 + 0.9 * static_cast<double>(rng.uniform(1000)) / 1000.0;
      auto p = pool(finds, others / 2, "ls");
      auto q = pool(0, others - others / 2, "grep");
      p.insert(p.end(), q.begin(), q.end());
      DistributionProfile prof{{{"find", target}}, std::nullopt};
      CAPTURE(finds);
      CAPTURE(others);
      CAPTURE(target);
      try {
        auto r = scale(p, prof, trial);
        CHECK(std::abs(r.realized("find") - target) <= kDefaultScaleTolerance + 1e-12);
        CHECK(r.kept.size() <= p.size());
      } catch (const InfeasibleProfile&) {
        CHECK(false);
      }
    }
  }
}
