#include "bashsynth/bash_ast.hpp"

#include <algorithm>

#include "bashsynth/error.hpp"
#include "bashsynth/syntax_kb.hpp"

namespace bashsynth {

bool ParamNode::is_placeholder() const {
  return !verbatim && !substitution && parse_placeholder_token(literal).has_value();
}

bool ParamNode::operator==(const ParamNode& other) const {
  return literal == other.literal && category == other.category && verbatim == other.verbatim &&
         substitution == other.substitution;
}

bool FlagNode::operator==(const FlagNode& other) const {
  return token == other.token && arg == other.arg && attached == other.attached &&
         exec_body == other.exec_body;
}

bool UtilityNode::operator==(const UtilityNode& other) const {
  return name == other.name && args == other.args && redirect == other.redirect;
}

std::vector<std::reference_wrapper<const FlagNode>> UtilityNode::flags() const {
  std::vector<std::reference_wrapper<const FlagNode>> out;
  for (const auto& a : args) {
    if (auto f = std::get_if<FlagNode>(&a)) out.emplace_back(*f);
  }
  return out;
}

std::vector<std::reference_wrapper<const ParamNode>> UtilityNode::params() const {
  std::vector<std::reference_wrapper<const ParamNode>> out;
  for (const auto& a : args) {
    if (auto p = std::get_if<ParamNode>(&a)) out.emplace_back(*p);
  }
  return out;
}

std::vector<std::string_view> UtilityNode::flag_tokens() const {
  std::vector<std::string_view> out;
  for (const auto& a : args) {
    if (auto f = std::get_if<FlagNode>(&a)) out.push_back(f->token);
  }
  return out;
}

std::vector<std::reference_wrapper<const UtilityNode>> UtilityNode::nested() const {
  std::vector<std::reference_wrapper<const UtilityNode>> out;
  auto collect = [&](const std::optional<NestedCommand>& n) {
    if (!n) return;
    for (const auto& s : n->stages) out.emplace_back(s);
  };
  for (const auto& a : args) {
    if (auto f = std::get_if<FlagNode>(&a)) {
      collect(f->exec_body);
      if (f->arg) collect(f->arg->substitution);
    } else {
      collect(std::get<ParamNode>(a).substitution);
    }
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Type { Word, Pipe, Semicolon, Redirect, Substitution };
  Type type;
  std::string text;     // full source text of the token
  std::string inner;    // contents of $(...) for substitutions
  std::size_t column;   // 1-based
};

bool is_space(char c) { return c == ' ' || c == '\t'; }
bool is_operator(char c) {
  return c == '|' || c == ';' || c == '&' || c == '<' || c == '>' || c == '(' || c == ')';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
      if (pos_ >= src_.size()) break;
      const std::size_t col = pos_ + 1;
      const char c = src_[pos_];
      if (c == '\n' || c == '\r') throw ParseError("multi-line commands are not supported", col);
      if (c == '|') {
        if (peek(1) == '|') throw ParseError("'||' lists are not supported", col);
        out.push_back({Token::Type::Pipe, "|", {}, col});
        ++pos_;
      } else if (c == ';') {
        if (peek(1) == ';') throw ParseError("';;' is not supported", col);
        out.push_back({Token::Type::Semicolon, ";", {}, col});
        ++pos_;
      } else if (c == '>') {
        if (peek(1) == '>' || peek(1) == '&' || peek(1) == '|') {
          throw ParseError("only the plain '>' redirection is supported", col);
        }
        out.push_back({Token::Type::Redirect, ">", {}, col});
        ++pos_;
      } else if (c == '&') {
        throw ParseError("'&' and '&&' are not supported", col);
      } else if (c == '<') {
        throw ParseError("input redirection is not supported", col);
      } else if (c == '(' || c == ')') {
        throw ParseError("subshell groups are not supported", col);
      } else {
        out.push_back(word(col));
      }
    }
    return out;
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  // Advances past a closing delimiter that matches an opening at pos_.
  void skip_single_quoted(std::size_t col) {
    auto close = src_.find('\'', pos_ + 1);
    if (close == std::string_view::npos) throw ParseError("unbalanced single quote", col);
    pos_ = close + 1;
  }

  void skip_double_quoted(std::size_t col) {
    std::size_t i = pos_ + 1;
    while (i < src_.size() && src_[i] != '"') {
      if (src_[i] == '\\') ++i;
      ++i;
    }
    if (i >= src_.size()) throw ParseError("unbalanced double quote", col);
    pos_ = i + 1;
  }

  void skip_backquoted(std::size_t col) {
    std::size_t i = pos_ + 1;
    while (i < src_.size() && src_[i] != '`') {
      if (src_[i] == '\\') ++i;
      ++i;
    }
    if (i >= src_.size()) throw ParseError("unbalanced backquote", col);
    pos_ = i + 1;
  }

  // pos_ is at "$(": moves past the matching ")".
  void skip_substitution(std::size_t col) {
    std::size_t depth = 0;
    pos_ += 1;  // at '('
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\'') {
        skip_single_quoted(col);
        continue;
      }
      if (c == '"') {
        skip_double_quoted(col);
        continue;
      }
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) {
        ++pos_;
        return;
      }
      ++pos_;
    }
    throw ParseError("unbalanced '$('", col);
  }

  Token word(std::size_t col) {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (is_space(c) || c == '\n' || c == '\r') break;
      if (c == '\'') {
        skip_single_quoted(col);
      } else if (c == '"') {
        skip_double_quoted(col);
      } else if (c == '`') {
        skip_backquoted(col);
      } else if (c == '\\') {
        if (pos_ + 1 >= src_.size()) throw ParseError("dangling backslash", pos_ + 1);
        pos_ += 2;
      } else if (c == '$' && peek(1) == '(') {
        skip_substitution(col);
      } else if (is_operator(c)) {
        break;
      } else {
        ++pos_;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (pos_ < src_.size() && src_[pos_] == '>' &&
        std::all_of(text.begin(), text.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw ParseError("file-descriptor redirections are not supported", col);
    }
    if (text.size() >= 3 && text.compare(0, 2, "$(") == 0 && text.back() == ')') {
      // Only a word that is exactly one substitution becomes a nested node.
      Lexer probe(text);
      probe.pos_ = 0;
      probe.skip_substitution(col);
      if (probe.pos_ == text.size()) {
        return {Token::Type::Substitution, text, text.substr(2, text.size() - 3), col};
      }
    }
    return {Token::Type::Word, std::move(text), {}, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string render_stages(const std::vector<UtilityNode>& stages);

// ---------------------------------------------------------------------------
// Parser

bool is_exec_flag(std::string_view token) {
  return token == "-exec" || token == "-execdir" || token == "-ok" || token == "-okdir";
}

bool is_exec_terminator(std::string_view word) {
  return word == "\\;" || word == "';'" || word == "\";\"";
}

bool is_flag_word(std::string_view word) { return word.size() > 1 && word.front() == '-'; }

bool is_command_runner(std::string_view utility) {
  return utility == "xargs" || utility == "env" || utility == "nice" || utility == "nohup" ||
         utility == "timeout" || utility == "time" || utility == "watch" || utility == "sudo";
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const SyntaxKb* kb, int depth)
      : tokens_(std::move(tokens)), kb_(kb), depth_(depth) {}

  std::vector<UtilityNode> pipeline(std::size_t fallback_column) {
    std::vector<UtilityNode> stages;
    if (tokens_.empty()) throw ParseError("empty command", fallback_column);
    while (true) {
      stages.push_back(utility(/*in_exec=*/false));
      if (at_end()) break;
      const Token& t = tokens_[pos_];
      if (t.type != Token::Type::Pipe) {
        throw ParseError("unexpected '" + t.text + "'", t.column);
      }
      ++pos_;
      if (at_end()) throw ParseError("pipe stage has no utility", t.column + 1);
    }
    return stages;
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }

  ParamNode make_param(const Token& t, const std::string& utility, std::string_view flag,
                       std::optional<PlaceholderKind> declared) {
    ParamNode p;
    p.literal = t.text;
    if (t.type == Token::Type::Substitution) {
      if (depth_ >= 1) throw ParseError("nesting deeper than one level", t.column);
      Parser inner(Lexer(t.inner).run(), kb_, depth_ + 1);
      p.substitution = NestedCommand{inner.pipeline(t.column), ")"};
      p.literal = "$(" + render_stages(p.substitution->stages) + ")";
      p.category = PlaceholderKind::Regex;
      return p;
    }
    if (t.text == "{}") {
      p.verbatim = true;
      p.category = PlaceholderKind::Regex;
      return p;
    }
    p.category = categorize(t.text, ArgContext{utility, flag, declared});
    return p;
  }

  std::optional<PlaceholderKind> declared_flag_kind(const std::string& utility,
                                                    std::string_view flag, bool& takes_arg) {
    takes_arg = false;
    if (!kb_) return std::nullopt;
    auto arg = kb_->flag_argument(utility, flag);
    if (!arg || !*arg) return std::nullopt;
    takes_arg = true;
    return to_parser_kind(**arg);
  }

  UtilityNode utility(bool in_exec) {
    const Token& head = tokens_[pos_];
    if (head.type != Token::Type::Word) {
      throw ParseError("stage has no utility token", head.column);
    }
    if (in_exec && (head.text == ";" || is_exec_terminator(head.text))) {
      throw ParseError("empty -exec body", head.column);
    }
    if (is_flag_word(head.text)) throw ParseError("stage has no utility token", head.column);
    UtilityNode node;
    node.name = head.text;
    ++pos_;

    // Utilities such as xargs run their first operand as a command; the
    // words after it are typed against that command's spec.
    std::string owner = node.name;
    const bool runs_command = is_command_runner(node.name);
    std::size_t positional = 0;
    std::string_view last_flag;
    bool options_ended = false;
    while (!at_end()) {
      const Token& t = tokens_[pos_];
      if (t.type == Token::Type::Pipe) break;
      if (in_exec) {
        if (t.type == Token::Type::Semicolon || is_exec_terminator(t.text)) break;
        if (t.text == "+" && !node.args.empty()) {
          auto* prev = std::get_if<ParamNode>(&node.args.back());
          if (prev && prev->verbatim && prev->literal == "{}") break;
        }
      }
      if (t.type == Token::Type::Semicolon) {
        throw ParseError("command lists with ';' are not supported", t.column);
      }
      if (t.type == Token::Type::Redirect) {
        if (node.redirect) throw ParseError("only one redirection is supported", t.column);
        ++pos_;
        if (at_end() || tokens_[pos_].type != Token::Type::Word) {
          throw ParseError("redirection needs a target", t.column);
        }
        node.redirect = make_param(tokens_[pos_], node.name, ">", std::nullopt);
        ++pos_;
        continue;
      }

      if (t.type == Token::Type::Word && !options_ended && is_flag_word(t.text)) {
        ++pos_;
        node.args.emplace_back(flag(t, owner));
        const auto& f = std::get<FlagNode>(node.args.back());
        last_flag = f.token;
        if (f.token == "--") options_ended = true;
        continue;
      }

      std::optional<PlaceholderKind> declared;
      const bool starts_command = runs_command && owner == node.name && t.type == Token::Type::Word;
      if (kb_ && !starts_command) {
        if (auto k = kb_->positional_kind(owner, positional)) declared = to_parser_kind(*k);
      }
      node.args.emplace_back(make_param(t, owner, last_flag, declared));
      last_flag = {};
      ++positional;
      ++pos_;
      if (starts_command) {
        std::get<ParamNode>(node.args.back()).verbatim = true;
        owner = t.text;
        positional = 0;
      }
    }
    return node;
  }

  FlagNode flag(const Token& t, const std::string& utility) {
    FlagNode f;
    f.token = t.text;

    if (is_exec_flag(t.text)) {
      if (depth_ >= 1) throw ParseError("nesting deeper than one level", t.column);
      if (at_end()) throw ParseError("-exec without a command", t.column);
      Parser body(std::vector<Token>(tokens_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                     tokens_.end()),
                  kb_, depth_ + 1);
      UtilityNode inner = body.utility(/*in_exec=*/true);
      if (body.at_end()) throw ParseError("-exec body is not terminated", t.column);
      const Token& term = body.tokens_[body.pos_];
      if (term.type == Token::Type::Pipe) throw ParseError("-exec body is not terminated", t.column);
      f.exec_body = NestedCommand{{std::move(inner)}, term.text};
      pos_ += body.pos_ + 1;
      return f;
    }

    if (t.text.size() > 2 && t.text.compare(0, 2, "--") == 0) {
      auto eq = t.text.find('=');
      if (eq != std::string::npos) {
        f.token = t.text.substr(0, eq);
        Token value{Token::Type::Word, t.text.substr(eq + 1), {}, t.column + eq + 1};
        bool takes_arg = false;
        auto declared = declared_flag_kind(utility, f.token, takes_arg);
        f.arg = make_param(value, utility, f.token, declared);
        f.attached = true;
        return f;
      }
    }

    bool takes_arg = false;
    auto declared = declared_flag_kind(utility, f.token, takes_arg);
    if (takes_arg && !at_end()) {
      const Token& next = tokens_[pos_];
      if (next.type == Token::Type::Word || next.type == Token::Type::Substitution) {
        f.arg = make_param(next, utility, f.token, declared);
        ++pos_;
      }
    }
    return f;
  }

  std::vector<Token> tokens_;
  const SyntaxKb* kb_;
  int depth_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

void append_tokens(const UtilityNode& node, std::vector<std::string>& out, bool flatten);

void append_nested(const NestedCommand& n, std::vector<std::string>& out) {
  for (std::size_t i = 0; i < n.stages.size(); ++i) {
    if (i > 0) out.emplace_back("|");
    append_tokens(n.stages[i], out, true);
  }
}

std::string render_stages(const std::vector<UtilityNode>& stages) {
  std::string out;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i > 0) out += " | ";
    out += render(stages[i]);
  }
  return out;
}

std::string param_text(const ParamNode& p) {
  if (p.substitution) return "$(" + render_stages(p.substitution->stages) + ")";
  return p.literal;
}

void append_param(const ParamNode& p, std::vector<std::string>& out, bool flatten) {
  if (p.substitution && flatten) {
    out.emplace_back("$(");
    append_nested(*p.substitution, out);
    out.emplace_back(")");
    return;
  }
  out.push_back(param_text(p));
}

void append_tokens(const UtilityNode& node, std::vector<std::string>& out, bool flatten) {
  out.push_back(node.name);
  for (const auto& a : node.args) {
    if (const auto* f = std::get_if<FlagNode>(&a)) {
      if (f->attached && f->arg) {
        out.push_back(f->token + "=" + param_text(*f->arg));
        continue;
      }
      out.push_back(f->token);
      if (f->arg) append_param(*f->arg, out, flatten);
      if (f->exec_body) {
        for (const auto& s : f->exec_body->stages) append_tokens(s, out, flatten);
        out.push_back(f->exec_body->terminator);
      }
    } else {
      append_param(std::get<ParamNode>(a), out, flatten);
    }
  }
  if (node.redirect) {
    out.emplace_back(">");
    append_param(*node.redirect, out, flatten);
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ' ';
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Placeholder walks

template <typename Fn>
void for_each_param(UtilityNode& node, Fn&& fn);

template <typename Fn>
void for_each_param(ParamNode& p, Fn&& fn) {
  if (p.substitution) {
    for (auto& s : p.substitution->stages) for_each_param(s, fn);
    return;
  }
  fn(p);
}

template <typename Fn>
void for_each_param(UtilityNode& node, Fn&& fn) {
  for (auto& a : node.args) {
    if (auto* f = std::get_if<FlagNode>(&a)) {
      if (f->arg) for_each_param(*f->arg, fn);
      if (f->exec_body) {
        for (auto& s : f->exec_body->stages) for_each_param(s, fn);
      }
    } else {
      for_each_param(std::get<ParamNode>(a), fn);
    }
  }
  if (node.redirect) for_each_param(*node.redirect, fn);
}

// Substitution literals mirror their (possibly rewritten) bodies.
void refresh_substitutions(UtilityNode& node) {
  auto refresh = [](ParamNode& p) {
    if (!p.substitution) return;
    for (auto& s : p.substitution->stages) refresh_substitutions(s);
    p.literal = param_text(p);
  };
  for (auto& a : node.args) {
    if (auto* f = std::get_if<FlagNode>(&a)) {
      if (f->arg) refresh(*f->arg);
      if (f->exec_body) {
        for (auto& s : f->exec_body->stages) refresh_substitutions(s);
      }
    } else {
      refresh(std::get<ParamNode>(a));
    }
  }
  if (node.redirect) refresh(*node.redirect);
}

}  // namespace

BashAst parse(std::string_view source, const SyntaxKb* kb) {
  auto first = source.find_first_not_of(" \t");
  if (first == std::string_view::npos) throw ParseError("empty command", 1);
  Parser parser(Lexer(source).run(), kb, 0);
  BashAst ast;
  ast.stages = parser.pipeline(first + 1);
  ast.raw = std::string(source);
  return ast;
}

std::string render(const UtilityNode& node) {
  std::vector<std::string> parts;
  append_tokens(node, parts, false);
  return join(parts);
}

std::string render(const BashAst& ast) { return render_stages(ast.stages); }

std::vector<std::string> tokens(const BashAst& ast) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ast.stages.size(); ++i) {
    if (i > 0) out.emplace_back("|");
    append_tokens(ast.stages[i], out, true);
  }
  return out;
}

BashAst templatize(const BashAst& ast) {
  BashAst out = ast;
  for (auto& stage : out.stages) {
    for_each_param(stage, [](ParamNode& p) {
      if (p.verbatim) return;
      p.literal = placeholder_token(p.category);
    });
    refresh_substitutions(stage);
  }
  out.raw = render(out);
  return out;
}

FillResult fill(const BashAst& template_ast, std::span<const TypedValue> values) {
  BashAst filled = template_ast;
  std::vector<bool> used(values.size(), false);
  std::size_t unfilled = 0;
  for (auto& stage : filled.stages) {
    for_each_param(stage, [&](ParamNode& p) {
      if (!p.is_placeholder()) return;
      const auto kind = *parse_placeholder_token(p.literal);
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!used[i] && values[i].kind == kind) {
          used[i] = true;
          p.literal = values[i].literal;
          return;
        }
      }
      ++unfilled;
    });
    refresh_substitutions(stage);
  }
  return {render(filled), unfilled};
}

std::set<std::string> vocabulary(std::span<const BashAst> corpus, bool templatized) {
  if (corpus.empty()) throw EmptyInputError("vocabulary of an empty corpus");
  std::set<std::string> vocab;
  for (const auto& ast : corpus) {
    auto toks = templatized ? tokens(templatize(ast)) : tokens(ast);
    vocab.insert(std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
  }
  return vocab;
}

}  // namespace bashsynth
