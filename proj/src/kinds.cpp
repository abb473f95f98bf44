#include "bashsynth/kinds.hpp"

namespace bashsynth {

std::string_view name_of(PlaceholderKind kind) {
  switch (kind) {
    case PlaceholderKind::Number: return "NUMBER";
    case PlaceholderKind::Path: return "PATH";
    case PlaceholderKind::File: return "FILE";
    case PlaceholderKind::Directory: return "DIRECTORY";
    case PlaceholderKind::Datetime: return "DATETIME";
    case PlaceholderKind::Permission: return "PERMISSION";
    case PlaceholderKind::Timespan: return "TIMESPAN";
    case PlaceholderKind::Size: return "SIZE";
    case PlaceholderKind::Regex: return "REGEX";
  }
  return "REGEX";
}

std::string placeholder_token(PlaceholderKind kind) {
  return "_" + std::string(name_of(kind));
}

std::optional<PlaceholderKind> placeholder_kind_from_name(std::string_view name) {
  for (auto k : kAllPlaceholderKinds) {
    if (name_of(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<PlaceholderKind> parse_placeholder_token(std::string_view token) {
  if (token.size() < 2 || token.front() != '_') return std::nullopt;
  return placeholder_kind_from_name(token.substr(1));
}

std::string_view name_of(GenArgKind kind) {
  switch (kind) {
    case GenArgKind::File: return "File";
    case GenArgKind::Directory: return "Directory";
    case GenArgKind::Path: return "Path";
    case GenArgKind::Quantity: return "Quantity";
    case GenArgKind::Pattern: return "Pattern";
    case GenArgKind::FormattedString: return "FormattedString";
    case GenArgKind::Separator: return "Separator";
    case GenArgKind::Permission: return "Permission";
    case GenArgKind::Size: return "Size";
    case GenArgKind::Timespan: return "Timespan";
    case GenArgKind::Datetime: return "Datetime";
    case GenArgKind::User: return "User";
    case GenArgKind::Group: return "Group";
    case GenArgKind::Extension: return "Extension";
    case GenArgKind::String: return "String";
  }
  return "String";
}

std::optional<GenArgKind> gen_kind_from_name(std::string_view name) {
  for (auto k : kAllGenArgKinds) {
    if (name_of(k) == name) return k;
  }
  return std::nullopt;
}

std::string gen_placeholder_token(GenArgKind kind) {
  return "[" + std::string(name_of(kind)) + "]";
}

std::optional<GenArgKind> parse_gen_placeholder_token(std::string_view token) {
  if (token.size() < 3 || token.front() != '[' || token.back() != ']') return std::nullopt;
  return gen_kind_from_name(token.substr(1, token.size() - 2));
}

PlaceholderKind to_parser_kind(GenArgKind kind) {
  switch (kind) {
    case GenArgKind::File: return PlaceholderKind::File;
    case GenArgKind::Directory: return PlaceholderKind::Directory;
    case GenArgKind::Path: return PlaceholderKind::Path;
    case GenArgKind::Quantity: return PlaceholderKind::Number;
    case GenArgKind::Permission: return PlaceholderKind::Permission;
    case GenArgKind::Size: return PlaceholderKind::Size;
    case GenArgKind::Timespan: return PlaceholderKind::Timespan;
    case GenArgKind::Datetime: return PlaceholderKind::Datetime;
    // Pattern, FormattedString and Separator are all regex-like; user, group,
    // extension and free strings have no dedicated parser category either.
    case GenArgKind::Pattern:
    case GenArgKind::FormattedString:
    case GenArgKind::Separator:
    case GenArgKind::User:
    case GenArgKind::Group:
    case GenArgKind::Extension:
    case GenArgKind::String:
      return PlaceholderKind::Regex;
  }
  return PlaceholderKind::Regex;
}

}  // namespace bashsynth
