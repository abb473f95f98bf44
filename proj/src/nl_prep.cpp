#include "bashsynth/nl_prep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "bashsynth/error.hpp"

namespace bashsynth {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }
bool is_consonant(char c) { return std::isalpha(static_cast<unsigned char>(c)) && !is_vowel(c); }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Short stems ending consonant-vowel-consonant usually lost a final 'e'
// ("mov" from "moved").
std::string restore_e(std::string stem) {
  const auto n = stem.size();
  if (n >= 3 && n <= 4 && is_consonant(stem[n - 3]) && is_vowel(stem[n - 2]) &&
      is_consonant(stem[n - 1]) && stem[n - 1] != 'w' && stem[n - 1] != 'x' &&
      stem[n - 1] != 'y') {
    stem += 'e';
  }
  return stem;
}

std::string undouble(std::string stem) {
  const auto n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
  }
  return stem;
}

// Strips punctuation that clings to words in prose but keeps characters
// meaningful inside paths and patterns.
std::string_view strip_punctuation(std::string_view w) {
  static constexpr std::string_view kEdge = ",;:!?()\"'`";
  while (!w.empty() && kEdge.find(w.front()) != std::string_view::npos) w.remove_prefix(1);
  while (!w.empty() && (kEdge.find(w.back()) != std::string_view::npos || w.back() == '.')) {
    if (w == "." || w == "..") break;
    w.remove_suffix(1);
  }
  return w;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

const std::set<std::string>& default_stop_words() {
  static const std::set<std::string> kWords = {
      "a",     "an",   "the",   "is",   "are",   "was",   "were",  "be",    "been",  "being",
      "am",    "of",   "in",    "on",   "at",    "to",    "for",   "with",  "by",    "from",
      "as",    "into", "onto",  "and",  "or",    "but",   "if",    "then",  "than",  "that",
      "this",  "these", "those", "it",  "its",   "i",     "me",    "my",    "we",    "our",
      "you",   "your", "he",    "she",  "they",  "them",  "their", "there", "here",  "which",
      "who",   "whom", "what",  "do",   "does",  "did",   "have",  "has",   "had",   "so",
      "such",  "can",  "could", "will", "would", "shall", "should", "may",  "might", "please",
  };
  return kWords;
}

const std::map<std::string, std::string>& default_lemma_exceptions() {
  static const std::map<std::string, std::string> kExceptions = {
      {"children", "child"}, {"data", "data"},         {"alias", "alias"},
      {"aliases", "alias"},  {"status", "status"},     {"process", "process"},
      {"processes", "process"}, {"news", "news"},     {"less", "less"},
      {"bus", "bus"},        {"this", "this"},         {"its", "its"},
      {"string", "string"},  {"strings", "string"},    {"thing", "thing"},
      {"things", "thing"},   {"nothing", "nothing"},   {"something", "something"},
      {"everything", "everything"}, {"anything", "anything"}, {"during", "during"},
      {"bring", "bring"},    {"ping", "ping"},         {"ring", "ring"},
      {"used", "use"},       {"using", "use"},         {"uses", "use"},
      {"making", "make"},    {"made", "make"},         {"creating", "create"},
      {"created", "create"}, {"changing", "change"},   {"changed", "change"},
      {"removing", "remove"}, {"removed", "remove"},   {"deleting", "delete"},
      {"deleted", "delete"}, {"compressing", "compress"}, {"archiving", "archive"},
      {"archived", "archive"}, {"named", "name"},      {"naming", "name"},
      {"sizes", "size"},     {"lines", "line"},        {"files", "file"},
      {"speed", "speed"},    {"need", "need"},         {"embedded", "embed"},
      {"red", "red"},        {"bed", "bed"},           {"shred", "shred"},
      {"sed", "sed"},        {"ls", "ls"},             {"ps", "ps"},
      {"less", "less"},      {"ones", "one"},          {"was", "be"},
      {"found", "find"},     {"written", "write"},     {"wrote", "write"},
      {"ran", "run"},        {"running", "run"},       {"given", "give"},
      {"gzip", "gzip"},      {"unzip", "unzip"},       {"lowercase", "lowercase"},
  };
  return kExceptions;
}

NlPreprocessor::NlPreprocessor()
    : NlPreprocessor(default_stop_words(), default_lemma_exceptions()) {}

NlPreprocessor::NlPreprocessor(std::set<std::string> stop_words,
                               std::map<std::string, std::string> exceptions)
    : stop_words_(std::move(stop_words)), exceptions_(std::move(exceptions)) {}

NlPreprocessor NlPreprocessor::from_files(const std::filesystem::path& stop_list,
                                          const std::filesystem::path& exceptions) {
  std::set<std::string> stops;
  for (auto& w : read_lines(stop_list)) stops.insert(lower(w));
  std::map<std::string, std::string> exc;
  for (auto& line : read_lines(exceptions)) {
    auto words = split_words(line);
    if (words.size() == 1) {
      exc[lower(words[0])] = lower(words[0]);
    } else if (words.size() == 2) {
      exc[lower(words[0])] = lower(words[1]);
    } else {
      throw Error("malformed lemma exception line: '" + line + "'");
    }
  }
  return NlPreprocessor(std::move(stops), std::move(exc));
}

std::string NlPreprocessor::lemmatize_once(const std::string& w) const {
  if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  if (!std::all_of(w.begin(), w.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
    return w;  // numbers, paths, flags
  }
  const auto n = w.size();
  if (n > 4 && ends_with(w, "ies")) return w.substr(0, n - 3) + "y";
  if (n > 4 && ends_with(w, "ied")) return w.substr(0, n - 3) + "y";
  if (n > 4 && (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "ches") ||
                ends_with(w, "shes") || ends_with(w, "zes"))) {
    return w.substr(0, n - 2);
  }
  if (n > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  if (n > 5 && ends_with(w, "ing")) return restore_e(undouble(w.substr(0, n - 3)));
  if (n > 4 && ends_with(w, "ed") && !ends_with(w, "eed")) {
    return restore_e(undouble(w.substr(0, n - 2)));
  }
  return w;
}

std::string NlPreprocessor::lemmatize(std::string_view word) const {
  // Iterate to a fixed point so preprocessing is idempotent.
  std::string current = lower(word);
  for (int i = 0; i < 8; ++i) {
    std::string next = lemmatize_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> NlPreprocessor::preprocess(std::string_view sentence) const {
  std::vector<std::string> out;
  for (auto raw : split_words(sentence)) {
    auto w = lower(strip_punctuation(raw));
    if (w.empty() || stop_words_.count(w)) continue;
    auto lemma = lemmatize(w);
    if (lemma.empty() || stop_words_.count(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

NlRecord NlPreprocessor::record(std::string_view sentence) const {
  return {std::string(sentence), preprocess(sentence), extract_params(sentence)};
}

std::vector<TypedValue> extract_params(std::string_view sentence) {
  std::vector<TypedValue> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    const char c = sentence[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '"' || c == '\'' || c == '`') {
      auto close = sentence.find(c, i + 1);
      // An apostrophe inside a word ("file's") is not a quote.
      if (close != std::string_view::npos && close > i + 1) {
        auto inner = sentence.substr(i + 1, close - i - 1);
        out.push_back({categorize(inner), std::string(inner)});
        i = close + 1;
        continue;
      }
    }
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    auto word = strip_punctuation(sentence.substr(i, j - i));
    i = j;
    if (word.empty()) continue;
    auto kind = categorize(word);
    if (kind != PlaceholderKind::Regex) out.push_back({kind, std::string(word)});
  }
  return out;
}

}  // namespace bashsynth
