#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bashsynth/bash_ast.hpp"

namespace bashsynth {

struct NlRecord {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<TypedValue> extracted;
};

// Stop-word filtering, lower-casing and rule-based lemmatization of English
// command descriptions.
class NlPreprocessor {
 public:
  // Built-in stop list and lemma exceptions.
  NlPreprocessor();
  NlPreprocessor(std::set<std::string> stop_words, std::map<std::string, std::string> exceptions);

  // Stop list: one word per line. Exception file: one entry per line, either
  // "word lemma" or a bare "word" that must be left as is. '#' starts a
  // comment line.
  static NlPreprocessor from_files(const std::filesystem::path& stop_list,
                                   const std::filesystem::path& exceptions);

  std::vector<std::string> preprocess(std::string_view sentence) const;
  std::string lemmatize(std::string_view word) const;
  NlRecord record(std::string_view sentence) const;

  const std::set<std::string>& stop_words() const { return stop_words_; }

 private:
  std::string lemmatize_once(const std::string& word) const;

  std::set<std::string> stop_words_;
  std::map<std::string, std::string> exceptions_;
};

const std::set<std::string>& default_stop_words();
const std::map<std::string, std::string>& default_lemma_exceptions();

// Typed parameter values mentioned in a sentence, in order of appearance.
// Quoted text is always a value; bare words only when a categorization rule
// other than the REGEX fallback recognizes them.
std::vector<TypedValue> extract_params(std::string_view sentence);

}  // namespace bashsynth
