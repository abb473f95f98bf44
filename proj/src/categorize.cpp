#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "bashsynth/bash_ast.hpp"

namespace bashsynth {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

struct FlagRef {
  std::string_view utility;  // empty: any utility
  std::string_view flag;
};

template <std::size_t N>
bool in_table(const std::array<FlagRef, N>& table, const ArgContext& ctx) {
  return std::any_of(table.begin(), table.end(), [&](const FlagRef& r) {
    return r.flag == ctx.flag && (r.utility.empty() || r.utility == ctx.utility);
  });
}

bool permission_context(const ArgContext& ctx) {
  static constexpr std::array<FlagRef, 6> kFlags = {{
      {"", "-perm"},
      {"", "--mode"},
      {"mkdir", "-m"},
      {"install", "-m"},
      {"mkfifo", "-m"},
      {"umask", "-S"},
  }};
  if (ctx.flag.empty()) return ctx.utility == "chmod" || ctx.utility == "umask";
  return in_table(kFlags, ctx);
}

bool size_context(const ArgContext& ctx) {
  static constexpr std::array<FlagRef, 11> kFlags = {{
      {"", "-size"},
      {"", "--size"},
      {"", "--block-size"},
      {"", "--bytes"},
      {"", "--max-size"},
      {"", "--min-size"},
      {"du", "-B"},
      {"df", "-B"},
      {"split", "-b"},
      {"truncate", "-s"},
      {"head", "-c"},
  }};
  return !ctx.flag.empty() && in_table(kFlags, ctx);
}

bool time_context(const ArgContext& ctx) {
  static constexpr std::array<FlagRef, 8> kFlags = {{
      {"", "-mtime"},
      {"", "-atime"},
      {"", "-ctime"},
      {"", "-mmin"},
      {"", "-amin"},
      {"", "-cmin"},
      {"", "--timeout"},
      {"timeout", "-k"},
  }};
  if (ctx.flag.empty()) return ctx.utility == "sleep" || ctx.utility == "timeout";
  return in_table(kFlags, ctx);
}

bool directory_context(const ArgContext& ctx) {
  static constexpr std::array<FlagRef, 7> kFlags = {{
      {"", "--directory"},
      {"", "--target-directory"},
      {"tar", "-C"},
      {"make", "-C"},
      {"cp", "-t"},
      {"mv", "-t"},
      {"ln", "-t"},
  }};
  if (ctx.flag.empty()) {
    return ctx.utility == "cd" || ctx.utility == "pushd" || ctx.utility == "mkdir" ||
           ctx.utility == "rmdir";
  }
  return in_table(kFlags, ctx);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool looks_like_permission(std::string_view s) {
  static const std::regex octal(R"([+/-]?[0-7]{3,4})");
  static const std::regex symbolic(R"([ugoa]*([+=-][rwxXst]*)+(,[ugoa]*([+=-][rwxXst]*)+)*)");
  std::string text(s);
  return std::regex_match(text, octal) || std::regex_match(text, symbolic);
}

bool looks_like_size(std::string_view s) {
  static const std::regex suffixed(R"([+-]?[0-9]+(\.[0-9]+)?([kKMGTPE]i?B?|[cbw]))");
  static const std::regex signed_count(R"([+-][0-9]+)");
  std::string text(s);
  return std::regex_match(text, suffixed) || std::regex_match(text, signed_count);
}

bool looks_like_timespan(std::string_view s) {
  static const std::regex suffixed(R"([+-]?[0-9]+(\.[0-9]+)?[smhdw])");
  static const std::regex signed_count(R"([+-][0-9]+)");
  std::string text(s);
  return std::regex_match(text, suffixed) || std::regex_match(text, signed_count);
}

bool looks_like_datetime(std::string_view s) {
  static const std::array<std::regex, 5> kPatterns = {
      std::regex(R"([0-9]{4}-[0-9]{1,2}-[0-9]{1,2}([ T][0-9]{1,2}:[0-9]{2}(:[0-9]{2})?)?)"),
      std::regex(R"([0-9]{4}/[0-9]{1,2}/[0-9]{1,2})"),
      std::regex(R"([0-9]{1,2}/[0-9]{1,2}/[0-9]{2,4})"),
      std::regex(R"([0-9]{1,2}:[0-9]{2}(:[0-9]{2})?)"),
      std::regex(R"(([0-9]{2})?[0-9]{10}\.[0-9]{2})"),  // touch -t stamp
  };
  std::string text(s);
  return std::any_of(kPatterns.begin(), kPatterns.end(),
                     [&](const std::regex& re) { return std::regex_match(text, re); });
}

std::string_view last_component(std::string_view s) {
  while (s.size() > 1 && s.back() == '/') s.remove_suffix(1);
  auto slash = s.rfind('/');
  return slash == std::string_view::npos ? s : s.substr(slash + 1);
}

bool has_file_extension(std::string_view s) {
  std::string_view name = last_component(s);
  if (name.empty() || name == "." || name == "..") return false;
  static constexpr std::string_view kMeta = "*?[]{}()|^$\\+ \t";

  if (name.front() == '.' && name.find('.', 1) == std::string_view::npos) {
    // dotfile such as .bashrc
    auto rest = name.substr(1);
    return !rest.empty() && std::all_of(rest.begin(), rest.end(), [](char c) {
      return is_alnum(c) || c == '_' || c == '-';
    });
  }
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) return false;
  auto stem = name.substr(0, dot);
  auto ext = name.substr(dot + 1);
  if (stem.find_first_of(kMeta) != std::string_view::npos) return false;
  if (ext.size() > 6 || !std::all_of(ext.begin(), ext.end(), is_alnum)) return false;
  return std::any_of(ext.begin(), ext.end(), is_alpha);
}

bool looks_like_path(std::string_view s) {
  if (s == "." || s == ".." || s == "~") return true;
  return s.find('/') != std::string_view::npos;
}

}  // namespace

PlaceholderKind categorize(std::string_view literal, const ArgContext& context) {
  const std::string_view s = unquote(literal);
  if (s.empty()) return PlaceholderKind::Regex;

  // Already-typed tokens keep their type so templatization is idempotent.
  if (auto k = parse_placeholder_token(s)) return *k;
  if (auto g = parse_gen_placeholder_token(s)) return to_parser_kind(*g);

  if (context.declared) return *context.declared;
  // Permission digits are all-digit too, so the permission-context check
  // runs ahead of the generic number rule.
  if (permission_context(context) && looks_like_permission(s)) return PlaceholderKind::Permission;
  if (all_digits(s)) return PlaceholderKind::Number;
  if (size_context(context) && looks_like_size(s)) return PlaceholderKind::Size;
  if (time_context(context) && looks_like_timespan(s)) return PlaceholderKind::Timespan;
  if (looks_like_datetime(s)) return PlaceholderKind::Datetime;
  if (looks_like_path(s) && !has_file_extension(s)) {
    return directory_context(context) ? PlaceholderKind::Directory : PlaceholderKind::Path;
  }
  if (has_file_extension(s)) return PlaceholderKind::File;
  return PlaceholderKind::Regex;
}

}  // namespace bashsynth
