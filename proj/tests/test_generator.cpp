#include <set>

#include "bashsynth/error.hpp"
#include "bashsynth/generator.hpp"
#include "bashsynth/syntax_kb.hpp"
#include "doctest.h"

using namespace bashsynth;

namespace {

UtilitySpec tar_spec() {
  return parse_specs(
      R"({"name": "tar", "template": ["UTILITY", "FLAGS", "Path"], "flags": [{"token": "-c"}, {"token": "-j"}, {"token": "-f", "arg": "File"}]})")[0];
}

UtilitySpec ls_spec() {
  UtilitySpec s;
  s.name = "ls";
  s.slots = {TemplateSlot::utility(), TemplateSlot::flags(), TemplateSlot::positional(GenArgKind::Path)};
  for (const char* f : {"-a", "-l", "-h", "-R", "-r", "-t", "-S", "-1", "-d", "-F"}) s.flags.push_back({f, {}});
  return s;
}

UtilitySpec find_spec() {
  UtilitySpec s;
  s.name = "find";
  s.slots = {TemplateSlot::utility(), TemplateSlot::positional(GenArgKind::Path), TemplateSlot::flags()};
  s.flags = {{"-name", GenArgKind::Pattern}, {"-type", GenArgKind::String}, {"-empty", {}},
             {"-inum", GenArgKind::Quantity}, {"-print", {}}};
  s.pipe_successors = {"xargs", "sort"};
  return s;
}

UtilitySpec xargs_spec() {
  UtilitySpec s;
  s.name = "xargs";
  s.slots = {TemplateSlot::utility(), TemplateSlot::flags()};
  s.flags = {{"-0", {}}, {"-r", {}}, {"-n", GenArgKind::Quantity}};
  return s;
}

std::vector<std::string> rendered(const std::vector<GeneratedCommand>& v) {
  std::vector<std::string> out;
  for (const auto& c : v) out.push_back(c.rendered());
  return out;
}

}  // namespace

TEST_SUITE("generator") {
  TEST_CASE("subset counts") {
    CHECK(count_flag_subsets(3) == 8);
    CHECK(count_flag_subsets(10) == 176);
    CHECK(count_flag_subsets(0) == 1);
    CHECK(count_flag_subsets(2) == 4);
    CHECK(count_flag_subsets(19) == 1160);
  }

  TEST_CASE("tar: eight templates in enumeration order") {
    auto v = generate_unpiped(tar_spec(), kUnlimited, 1);
    CHECK(rendered(v) == std::vector<std::string>{
                             "tar [Path]",
                             "tar -c [Path]",
                             "tar -f [File] [Path]",
                             "tar -j [Path]",
                             "tar -c -f [File] [Path]",
                             "tar -c -j [Path]",
                             "tar -f [File] -j [Path]",
                             "tar -c -f [File] -j [Path]",
                         });
    CHECK(v[4].provenance.flags[0] == std::vector<std::string>{"-c", "-f"});
    CHECK(v[4].provenance.utilities == std::vector<std::string>{"tar"});
  }

  TEST_CASE("ten flags give 176 distinct templates") {
    auto v = generate_unpiped(ls_spec(), kUnlimited, 1);
    CHECK(v.size() == 176);
    std::set<std::string> r;
    for (const auto& c : v) r.insert(c.rendered());
    CHECK(r.size() == 176);
    std::set<std::string> ids;
    for (const auto& c : v) ids.insert(c.id);
    CHECK(ids.size() == 176);
  }

  TEST_CASE("limit 0 and limits below the total") {
    CHECK(generate_unpiped(ls_spec(), 0, 1).empty());
    auto a = generate_unpiped(ls_spec(), 20, 5);
    auto b = generate_unpiped(ls_spec(), 20, 5);
    auto c = generate_unpiped(ls_spec(), 20, 6);
    CHECK(a.size() == 20);
    CHECK(rendered(a) == rendered(b));
    CHECK(rendered(a) != rendered(c));
    // sampled templates stay in enumeration order
    auto all = rendered(generate_unpiped(ls_spec(), kUnlimited, 5));
    std::size_t pos = 0;
    for (const auto& s : rendered(a)) {
      auto it = std::find(all.begin() + static_cast<std::ptrdiff_t>(pos), all.end(), s);
      REQUIRE(it != all.end());
      pos = static_cast<std::size_t>(it - all.begin()) + 1;
    }
  }

  TEST_CASE("templates place flags at the FLAGS slot and parse") {
    auto v = generate_unpiped(find_spec(), kUnlimited, 1);
    CHECK(v.size() == count_flag_subsets(5));
    SyntaxKb kb({find_spec()});
    for (const auto& c : v) {
      CAPTURE(c.rendered());
      CHECK(c.rendered().rfind("find [Path]", 0) == 0);
      CHECK(parse(c.rendered(), &kb) == c.template_ast);
      CHECK(c.template_ast.stages[0].flags().size() <= kMaxFlagsPerUtility);
    }
    auto p = v[3].parser_template();
    CHECK(render(p).find('[') == std::string::npos);
  }

  TEST_CASE("a spec without template slots is rejected") {
    UtilitySpec bad;
    bad.name = "x";
    CHECK_THROWS_AS(generate_unpiped(bad, kUnlimited, 1), SpecError);
  }

  TEST_CASE("piped cross product") {
    auto v = generate_piped(find_spec(), xargs_spec(), 2, 3, 11);
    REQUIRE(v.size() == 6);
    for (const auto& c : v) {
      CHECK(c.template_ast.pipe_count() == 1);
      CHECK(c.provenance.pipe_partner == std::optional<std::string>("xargs"));
    }
    // head-major
    CHECK(v[0].template_ast.stages[0] == v[1].template_ast.stages[0]);
    CHECK(v[0].template_ast.stages[0] == v[2].template_ast.stages[0]);
    CHECK_FALSE(v[0].template_ast.stages[0] == v[3].template_ast.stages[0]);
    CHECK(rendered(v) == rendered(generate_piped(find_spec(), xargs_spec(), 2, 3, 11)));

    UtilitySpec grep = xargs_spec();
    grep.name = "grep";
    CHECK_THROWS_AS(generate_piped(find_spec(), grep, 2, 3, 11), PipeError);
  }

  TEST_CASE("streaming and collected piped generation agree") {
    std::vector<std::string> streamed;
    for_each_piped(find_spec(), xargs_spec(), 4, 5, 3,
                   [&](GeneratedCommand&& c) { streamed.push_back(c.rendered()); });
    CHECK(streamed == rendered(generate_piped(find_spec(), xargs_spec(), 4, 5, 3)));
  }

  TEST_CASE("dedup") {
    auto d = dedup(std::vector<std::string>{"a", "b", "a"});
    CHECK(d.items == std::vector<std::string>{"a", "b"});
    CHECK(d.duplicates == 1);
    CHECK(d.duplicate_rate() == doctest::Approx(1.0 / 3));

    auto same = dedup(std::vector<std::string>{"x", "y"});
    CHECK(same.items.size() == 2);
    CHECK(same.duplicate_rate() == 0.0);

    auto v = generate_unpiped(tar_spec(), kUnlimited, 1);
    auto doubled = v;
    doubled.insert(doubled.end(), v.begin(), v.end());
    auto dg = dedup(doubled);
    CHECK(dg.items.size() == 8);
    CHECK(dg.duplicates == 8);
    CHECK(rendered(dg.items) == rendered(v));
  }
}
