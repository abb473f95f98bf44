#include <set>

#include "bashsynth/kinds.hpp"
#include "bashsynth/rng.hpp"
#include "doctest.h"

using namespace bashsynth;

TEST_SUITE("kinds") {
  TEST_CASE("generator kinds: fifteen members, each mapped to one parser kind") {
    CHECK(kAllGenArgKinds.size() == 15);
    std::set<std::string> names;
    for (auto k : kAllGenArgKinds) {
      names.insert(std::string(name_of(k)));
      CHECK(gen_kind_from_name(name_of(k)) == k);
      CHECK(parse_gen_placeholder_token(gen_placeholder_token(k)) == k);
      // total: every member lands inside the nine parser kinds
      auto p = to_parser_kind(k);
      CHECK(std::find(kAllPlaceholderKinds.begin(), kAllPlaceholderKinds.end(), p) !=
            kAllPlaceholderKinds.end());
    }
    CHECK(names.size() == 15);
  }

  TEST_CASE("to_parser_kind examples") {
    CHECK(to_parser_kind(GenArgKind::Pattern) == PlaceholderKind::Regex);
    CHECK(to_parser_kind(GenArgKind::FormattedString) == PlaceholderKind::Regex);
    CHECK(to_parser_kind(GenArgKind::Separator) == PlaceholderKind::Regex);
    CHECK(to_parser_kind(GenArgKind::Quantity) == PlaceholderKind::Number);
    CHECK(to_parser_kind(GenArgKind::File) == PlaceholderKind::File);
    CHECK(to_parser_kind(GenArgKind::Directory) == PlaceholderKind::Directory);
    CHECK(to_parser_kind(GenArgKind::Permission) == PlaceholderKind::Permission);
  }

  TEST_CASE("placeholder tokens") {
    CHECK(placeholder_token(PlaceholderKind::Path) == "_PATH");
    CHECK(parse_placeholder_token("_NUMBER") == PlaceholderKind::Number);
    CHECK_FALSE(parse_placeholder_token("_FOO").has_value());
    CHECK_FALSE(parse_placeholder_token("PATH").has_value());
    CHECK(gen_placeholder_token(GenArgKind::FormattedString) == "[FormattedString]");
    CHECK_FALSE(parse_gen_placeholder_token("[abc]").has_value());
  }

  TEST_CASE("seeded rng is reproducible and unbiased enough") {
    SeededRng a(7), b(7), c(8);
    std::vector<std::uint64_t> xa, xb, xc;
    for (int i = 0; i < 5; ++i) {
      xa.push_back(a.next());
      xb.push_back(b.next());
      xc.push_back(c.next());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);

    SeededRng r(1);
    std::vector<int> counts(6);
    for (int i = 0; i < 60000; ++i) ++counts[r.uniform(6)];
    for (int n : counts) CHECK(std::abs(n - 10000) < 500);
  }

  TEST_CASE("sample_indices: distinct, sorted, in range") {
    SeededRng r(3);
    auto s = r.sample_indices(100, 30);
    CHECK(s.size() == 30);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 30);
    CHECK(s.back() < 100);
    CHECK(r.sample_indices(5, 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }

  TEST_CASE("stable hash and derived seeds") {
    // FNV-1a reference values
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(to_hex(0xabcULL) == "0000000000000abc");
    CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
    CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
    CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  }
}
