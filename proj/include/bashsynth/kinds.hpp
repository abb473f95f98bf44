#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace bashsynth {

// Parser-side placeholder categories. REGEX is the fallback category.
enum class PlaceholderKind {
  Number,
  Path,
  File,
  Directory,
  Datetime,
  Permission,
  Timespan,
  Size,
  Regex,
};

inline constexpr std::array<PlaceholderKind, 9> kAllPlaceholderKinds = {
    PlaceholderKind::Number,     PlaceholderKind::Path,     PlaceholderKind::File,
    PlaceholderKind::Directory,  PlaceholderKind::Datetime, PlaceholderKind::Permission,
    PlaceholderKind::Timespan,   PlaceholderKind::Size,     PlaceholderKind::Regex,
};

// Upper-case name, e.g. "PATH".
std::string_view name_of(PlaceholderKind kind);
// Rendered token, e.g. "_PATH".
std::string placeholder_token(PlaceholderKind kind);
std::optional<PlaceholderKind> placeholder_kind_from_name(std::string_view name);
// Recognizes "_PATH" style tokens.
std::optional<PlaceholderKind> parse_placeholder_token(std::string_view token);

// Generator-side argument types. These are finer-grained than the parser
// categories and are what manual pages distinguish.
enum class GenArgKind {
  File,
  Directory,
  Path,
  Quantity,
  Pattern,
  FormattedString,
  Separator,
  Permission,
  Size,
  Timespan,
  Datetime,
  User,
  Group,
  Extension,
  String,
};

inline constexpr std::array<GenArgKind, 15> kAllGenArgKinds = {
    GenArgKind::File,       GenArgKind::Directory, GenArgKind::Path,
    GenArgKind::Quantity,   GenArgKind::Pattern,   GenArgKind::FormattedString,
    GenArgKind::Separator,  GenArgKind::Permission, GenArgKind::Size,
    GenArgKind::Timespan,   GenArgKind::Datetime,  GenArgKind::User,
    GenArgKind::Group,      GenArgKind::Extension, GenArgKind::String,
};

// CamelCase name, e.g. "FormattedString".
std::string_view name_of(GenArgKind kind);
std::optional<GenArgKind> gen_kind_from_name(std::string_view name);
// Rendered generator placeholder, e.g. "[File]".
std::string gen_placeholder_token(GenArgKind kind);
std::optional<GenArgKind> parse_gen_placeholder_token(std::string_view token);

// Each generator kind collapses onto exactly one parser category.
PlaceholderKind to_parser_kind(GenArgKind kind);

}  // namespace bashsynth
