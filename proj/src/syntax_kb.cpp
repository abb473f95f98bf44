#include "bashsynth/syntax_kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bashsynth/error.hpp"
#include "json.hpp"

namespace bashsynth {

namespace fs = std::filesystem;
using nlohmann::json;

std::string TemplateSlot::str() const {
  switch (kind) {
    case Kind::Utility: return "UTILITY";
    case Kind::Flags: return "FLAGS";
    case Kind::Positional: return std::string(name_of(arg));
  }
  return {};
}

std::optional<TemplateSlot> TemplateSlot::parse(std::string_view text) {
  if (text == "UTILITY") return utility();
  if (text == "FLAGS") return flags();
  if (auto k = gen_kind_from_name(text)) return positional(*k);
  return std::nullopt;
}

const FlagSpec* UtilitySpec::find_flag(std::string_view token) const {
  for (const auto& f : flags) {
    if (f.token == token) return &f;
  }
  return nullptr;
}

std::vector<GenArgKind> UtilitySpec::positional_kinds() const {
  std::vector<GenArgKind> out;
  for (const auto& s : slots) {
    if (s.kind == TemplateSlot::Kind::Positional) out.push_back(s.arg);
  }
  return out;
}

bool UtilitySpec::can_pipe_to(std::string_view utility) const {
  return std::find(pipe_successors.begin(), pipe_successors.end(), utility) !=
         pipe_successors.end();
}

void check_spec(const UtilitySpec& spec, std::size_t line) {
  if (spec.name.empty()) throw SchemaError("utility name is empty", line, "name");
  if (spec.name.find_first_of(" \t|") != std::string::npos) {
    throw SchemaError("utility name contains whitespace or '|'", line, "name");
  }
  int utility_slots = 0;
  int flag_slots = 0;
  for (const auto& s : spec.slots) {
    if (s.kind == TemplateSlot::Kind::Utility) ++utility_slots;
    if (s.kind == TemplateSlot::Kind::Flags) ++flag_slots;
  }
  if (!spec.slots.empty()) {
    if (utility_slots != 1 || spec.slots.front().kind != TemplateSlot::Kind::Utility) {
      throw SchemaError("template must start with exactly one UTILITY slot", line, "template");
    }
    if (flag_slots > 1) throw SchemaError("template has more than one FLAGS slot", line, "template");
  }
  std::set<std::string_view> seen;
  for (const auto& f : spec.flags) {
    if (f.token.size() < 2 || f.token.front() != '-') {
      throw SchemaError("flag token '" + f.token + "' must begin with '-'", line, "flags");
    }
    if (f.token.find_first_of(" \t") != std::string::npos) {
      throw SchemaError("flag token '" + f.token + "' contains whitespace", line, "flags");
    }
    if (!seen.insert(f.token).second) {
      throw SchemaError("duplicate flag '" + f.token + "'", line, "flags");
    }
  }
}

namespace {

std::vector<std::string> string_array(const json& doc, const char* key, std::size_t line,
                                      bool required) {
  std::vector<std::string> out;
  auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw SchemaError("missing required key", line, key);
    return out;
  }
  if (!it->is_array()) throw SchemaError("expected an array of strings", line, key);
  for (const auto& v : *it) {
    if (!v.is_string()) throw SchemaError("expected an array of strings", line, key);
    out.push_back(v.get<std::string>());
  }
  return out;
}

UtilitySpec spec_from_json(const json& doc, std::size_t line) {
  if (!doc.is_object()) throw SchemaError("expected a JSON object", line, "");
  static const std::set<std::string> kKnownKeys = {"name", "template", "flags",
                                                   "pipe_successors"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) throw SchemaError("unknown key", line, key);
  }

  UtilitySpec spec;
  auto name = doc.find("name");
  if (name == doc.end()) throw SchemaError("missing required key", line, "name");
  if (!name->is_string()) throw SchemaError("expected a string", line, "name");
  spec.name = name->get<std::string>();

  for (const auto& slot : string_array(doc, "template", line, true)) {
    auto parsed = TemplateSlot::parse(slot);
    if (!parsed) throw SchemaError("unknown template slot '" + slot + "'", line, "template");
    spec.slots.push_back(*parsed);
  }

  auto flags = doc.find("flags");
  if (flags == doc.end()) throw SchemaError("missing required key", line, "flags");
  if (!flags->is_array()) throw SchemaError("expected an array of objects", line, "flags");
  for (const auto& f : *flags) {
    if (!f.is_object() || !f.contains("token") || !f["token"].is_string()) {
      throw SchemaError("flag entries need a string 'token'", line, "flags");
    }
    for (const auto& [key, value] : f.items()) {
      if (key != "token" && key != "arg") throw SchemaError("unknown flag key", line, "flags." + key);
    }
    FlagSpec flag{f["token"].get<std::string>(), std::nullopt};
    if (f.contains("arg") && !f["arg"].is_null()) {
      if (!f["arg"].is_string()) throw SchemaError("expected a string", line, "flags.arg");
      auto kind = gen_kind_from_name(f["arg"].get<std::string>());
      if (!kind) {
        throw SchemaError("unknown argument kind '" + f["arg"].get<std::string>() + "'", line,
                          "flags.arg");
      }
      flag.arg = *kind;
    }
    spec.flags.push_back(std::move(flag));
  }

  spec.pipe_successors = string_array(doc, "pipe_successors", line, false);
  check_spec(spec, line);
  return spec;
}

json spec_to_json(const UtilitySpec& spec) {
  json slots = json::array();
  for (const auto& s : spec.slots) slots.push_back(s.str());
  json flags = json::array();
  for (const auto& f : spec.flags) {
    json entry = {{"token", f.token}};
    if (f.arg) entry["arg"] = std::string(name_of(*f.arg));
    flags.push_back(std::move(entry));
  }
  json doc;
  doc["name"] = spec.name;
  doc["template"] = std::move(slots);
  doc["flags"] = std::move(flags);
  doc["pipe_successors"] = spec.pipe_successors;
  return doc;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<UtilitySpec> parse_specs(std::string_view text) {
  std::vector<UtilitySpec> specs;
  std::set<std::string> names;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what(), line_no, "");
    }
    UtilitySpec spec = spec_from_json(doc, line_no);
    if (!names.insert(spec.name).second) {
      throw SchemaError("duplicate utility '" + spec.name + "'", line_no, "name");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<UtilitySpec> load_specs(const fs::path& path) {
  try {
    return parse_specs(read_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.filename().string() + ": " + e.what(), e.line(), e.field());
  }
}

std::string render_specs(std::span<const UtilitySpec> specs) {
  std::string out;
  for (const auto& s : specs) {
    out += spec_to_json(s).dump();
    out += '\n';
  }
  return out;
}

SyntaxKb::SyntaxKb(std::vector<UtilitySpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    check_spec(specs_[i]);
    if (!index_.emplace(specs_[i].name, i).second) {
      throw SchemaError("duplicate utility '" + specs_[i].name + "'", 0, "name");
    }
  }
}

SyntaxKb SyntaxKb::load(const fs::path& path) {
  if (!fs::is_directory(path)) return SyntaxKb(load_specs(path));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<UtilitySpec> all;
  for (const auto& f : files) {
    auto specs = load_specs(f);
    for (auto& s : specs) {
      bool duplicate = std::any_of(all.begin(), all.end(),
                                   [&](const UtilitySpec& o) { return o.name == s.name; });
      if (duplicate) {
        throw SchemaError(f.filename().string() + ": duplicate utility '" + s.name + "'", 0,
                          "name");
      }
      all.push_back(std::move(s));
    }
  }
  return SyntaxKb(std::move(all));
}

const UtilitySpec* SyntaxKb::find(std::string_view utility) const {
  auto it = index_.find(utility);
  return it == index_.end() ? nullptr : &specs_[it->second];
}

std::optional<std::optional<GenArgKind>> SyntaxKb::flag_argument(std::string_view utility,
                                                                 std::string_view flag) const {
  const UtilitySpec* spec = find(utility);
  if (!spec) return std::nullopt;
  if (const FlagSpec* f = spec->find_flag(flag)) return f->arg;

  // Clustered short options: every letter must be a known flag.
  if (flag.size() > 2 && flag[0] == '-' && flag[1] != '-') {
    std::optional<GenArgKind> last;
    for (std::size_t i = 1; i < flag.size(); ++i) {
      const char single[3] = {'-', flag[i], '\0'};
      const FlagSpec* f = spec->find_flag(single);
      if (!f) return std::nullopt;
      last = f->arg;
    }
    return last;
  }
  return std::nullopt;
}

std::optional<GenArgKind> SyntaxKb::positional_kind(std::string_view utility,
                                                    std::size_t index) const {
  const UtilitySpec* spec = find(utility);
  if (!spec) return std::nullopt;
  auto kinds = spec->positional_kinds();
  if (kinds.empty()) return std::nullopt;
  return kinds[std::min(index, kinds.size() - 1)];
}

}  // namespace bashsynth
