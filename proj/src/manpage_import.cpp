#include <algorithm>
#include <cctype>
#include <regex>
#include <utility>

#include "bashsynth/error.hpp"
#include "bashsynth/syntax_kb.hpp"

namespace bashsynth {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

// Section headers are unindented all-caps lines such as "OPTIONS".
bool is_header(std::string_view line) {
  if (line.empty() || std::isspace(static_cast<unsigned char>(line.front()))) return false;
  auto t = trim(line);
  if (t.empty()) return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c)) || c == ' ' || c == '-';
  });
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Metavariable keyword table. Matching is on the whole upper-cased name with
// surrounding punctuation removed.
std::optional<GenArgKind> kind_for_metavar(std::string_view raw) {
  std::string name;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') name += c;
  }
  name = upper(name);
  static const std::vector<std::pair<std::vector<std::string_view>, GenArgKind>> kTable = {
      {{"FILE", "FILES", "FILENAME", "ARCHIVE", "INFILE", "OUTFILE"}, GenArgKind::File},
      {{"DIR", "DIRECTORY", "DEST", "TARGET"}, GenArgKind::Directory},
      {{"PATH", "PATHS", "SOURCE", "STARTINGPOINT"}, GenArgKind::Path},
      {{"N", "NUM", "NUMBER", "COUNT", "LEVELS", "DEPTH", "LINES", "COLS", "WIDTH", "MAX",
        "INUM"},
       GenArgKind::Quantity},
      {{"PATTERN", "PATTERNS", "REGEX", "REGEXP", "GLOB", "EXPR"}, GenArgKind::Pattern},
      {{"FORMAT", "FMT", "TEMPLATE", "SCRIPT", "KEYDEF"}, GenArgKind::FormattedString},
      {{"SEP", "SEPARATOR", "DELIM", "DELIMITER", "CHAR"}, GenArgKind::Separator},
      {{"MODE", "PERM", "PERMS", "PERMISSIONS"}, GenArgKind::Permission},
      {{"SIZE", "BYTES", "BLOCKSIZE"}, GenArgKind::Size},
      {{"TIME", "DURATION", "SECONDS", "SECS", "INTERVAL", "DAYS", "MINUTES"},
       GenArgKind::Timespan},
      {{"DATE", "STAMP", "TIMESTAMP", "DATETIME"}, GenArgKind::Datetime},
      {{"USER", "OWNER", "UID", "LOGIN"}, GenArgKind::User},
      {{"GROUP", "GID"}, GenArgKind::Group},
      {{"EXT", "EXTENSION", "SUFFIX"}, GenArgKind::Extension},
      {{"STRING", "TEXT", "WORD", "LABEL", "NAME", "PREFIX"}, GenArgKind::String},
  };
  for (const auto& [names, kind] : kTable) {
    if (std::find(names.begin(), names.end(), name) != names.end()) return kind;
  }
  return std::nullopt;
}

struct FlagAlternative {
  std::string token;
  std::string metavar;
  bool optional_arg = false;
};

const std::regex& flag_alt_re() {
  // -f, -f FILE, --file=ARCHIVE, --color[=WHEN], -n <num>
  static const std::regex re(
      R"(^(-{1,2}[A-Za-z0-9?][A-Za-z0-9_-]*)(?:(\[?=)?\s?(<[^>]+>|[A-Za-z][A-Za-z_.-]*)\]?)?$)");
  return re;
}

// Splits "-C, --directory=DIR   change to DIR" into the option head and the
// description, then the head into comma-separated alternatives.
std::optional<std::vector<FlagAlternative>> parse_definition(std::string_view line) {
  auto t = trim(line);
  if (t.size() < 2 || t.front() != '-') return std::nullopt;

  std::string_view head = t;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == '\t' || (t[i] == ' ' && t[i + 1] == ' ')) {
      head = t.substr(0, i);
      break;
    }
  }

  std::vector<FlagAlternative> alts;
  std::size_t pos = 0;
  while (pos < head.size()) {
    auto comma = head.find(',', pos);
    auto piece = trim(head.substr(pos, comma == std::string_view::npos ? head.npos : comma - pos));
    pos = comma == std::string_view::npos ? head.size() : comma + 1;
    if (piece.empty()) continue;

    std::string text(piece);
    std::smatch m;
    if (!std::regex_match(text, m, flag_alt_re())) {
      // A one-line description without the two-space gap ("-r copy
      // recursively"): only the first word is the option.
      if (!alts.empty()) break;
      auto space = text.find(' ');
      std::string first = text.substr(0, space);
      if (!std::regex_match(first, m, flag_alt_re())) return std::nullopt;
      alts.push_back({m[1].str(), {}, false});
      break;
    }
    FlagAlternative alt{m[1].str(), m[3].str(), false};
    alt.optional_arg = m[2].matched && m[2].str().front() == '[';
    // A lower-case word after a space is description, not a metavariable.
    if (!alt.metavar.empty() && !m[2].matched && alt.metavar.front() != '<' &&
        std::islower(static_cast<unsigned char>(alt.metavar.front()))) {
      alt.metavar.clear();
    }
    alts.push_back(std::move(alt));
  }
  if (alts.empty()) return std::nullopt;
  return alts;
}

std::vector<TemplateSlot> template_from_synopsis(const std::vector<std::string_view>& lines,
                                                 std::string_view utility,
                                                 std::vector<std::string>& notes) {
  std::vector<TemplateSlot> slots = {TemplateSlot::utility(), TemplateSlot::flags()};
  bool in_synopsis = false;
  for (auto line : lines) {
    if (is_header(line)) {
      in_synopsis = trim(line) == "SYNOPSIS";
      continue;
    }
    if (!in_synopsis) continue;
    auto t = trim(line);
    if (t.substr(0, utility.size()) != utility) continue;

    std::string rest(t.substr(utility.size()));
    static const std::regex word_re(R"([A-Za-z_.-]+)");
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), word_re);
         it != std::sregex_iterator(); ++it) {
      std::string word = it->str();
      std::string up = upper(word);
      if (up.rfind("OPTION", 0) == 0 || up == "EXPRESSION") continue;
      if (word.front() == '-' || word.front() == '.' || up != word) continue;
      if (auto k = kind_for_metavar(word)) {
        slots.push_back(TemplateSlot::positional(*k));
      } else {
        notes.push_back("synopsis operand '" + word + "' has no known argument type");
      }
    }
    break;  // first usage line only
  }
  return slots;
}

}  // namespace

ImportedSpec import_manpage(std::string_view text, std::string_view utility) {
  ImportedSpec result;
  result.spec.name = std::string(utility);
  auto lines = split_lines(text);

  // Prefer OPTIONS, then DESCRIPTION; pages without headers are scanned whole.
  auto section = [&](std::string_view name) -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_header(lines[i]) && trim(lines[i]) == name) {
        std::size_t j = i + 1;
        while (j < lines.size() && !is_header(lines[j])) ++j;
        return std::make_pair(i + 1, j);
      }
    }
    return std::nullopt;
  };
  auto range = section("OPTIONS");
  if (!range) range = section("DESCRIPTION");
  if (!range) range = std::make_pair(std::size_t{0}, lines.size());

  for (std::size_t i = range->first; i < range->second; ++i) {
    auto alts = parse_definition(lines[i]);
    if (!alts) continue;

    const FlagAlternative* primary = &alts->front();
    for (const auto& a : *alts) {
      if (a.token.size() >= 2 && a.token[1] != '-') {
        primary = &a;
        break;
      }
    }
    std::string metavar;
    bool optional_arg = false;
    for (const auto& a : *alts) {
      if (!a.metavar.empty()) {
        metavar = a.metavar;
        optional_arg = a.optional_arg;
        break;
      }
    }

    FlagSpec flag{primary->token, std::nullopt};
    if (result.spec.find_flag(flag.token)) {
      result.review_notes.push_back("duplicate definition of " + flag.token + " ignored");
      continue;
    }
    if (!metavar.empty()) {
      if (optional_arg) {
        result.review_notes.push_back(flag.token + ": optional argument '" + metavar +
                                      "' treated as no argument");
      } else if (auto k = kind_for_metavar(metavar)) {
        flag.arg = *k;
      } else {
        flag.arg = GenArgKind::String;
        result.needs_review = true;
        result.review_notes.push_back(flag.token + ": unrecognized argument '" + metavar +
                                      "' guessed as String");
      }
    }
    result.spec.flags.push_back(std::move(flag));
  }

  if (result.spec.flags.empty()) {
    throw ImportError("no option definitions found in manual page for '" + std::string(utility) +
                      "'");
  }

  std::vector<std::string> synopsis_notes;
  result.spec.slots = template_from_synopsis(lines, utility, synopsis_notes);
  if (!synopsis_notes.empty()) {
    result.needs_review = true;
    result.review_notes.insert(result.review_notes.end(), synopsis_notes.begin(),
                               synopsis_notes.end());
  }
  check_spec(result.spec);
  return result;
}

}  // namespace bashsynth
