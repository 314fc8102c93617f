#include <cctype>
#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>

#include "grafcet/syntax.hpp"

namespace grafcet {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Lexical: return "lexical error";
    case ParseErrorKind::Syntax: return "syntax error";
    case ParseErrorKind::DuplicateId: return "duplicate id";
    case ParseErrorKind::UnknownReference: return "unknown reference";
  }
  return "error";
}

std::string format(const ParseError& e) {
  return e.span.file + ":" + std::to_string(e.span.line) + ":" + std::to_string(e.span.column) +
         ": " + to_string(e.kind) + ": " + e.message;
}

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
  std::int64_t value = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, const std::string& file, std::vector<ParseError>& errors)
      : s_(text), file_(file), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= s_.size()) {
        out.push_back({Tok::End, "end of file", span(1)});
        return out;
      }
      const char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
        out.push_back({Tok::Ident, s_.substr(i_, j - i_), span(j - i_)});
        advance(j - i_);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i_;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        Token t{Tok::Int, s_.substr(i_, j - i_), span(j - i_)};
        auto [p, ec] = std::from_chars(s_.data() + i_, s_.data() + j, t.value);
        if (ec != std::errc() || p != s_.data() + j)
          errors_.push_back({ParseErrorKind::Lexical, t.span, "integer literal " + t.text + " out of range"});
        out.push_back(std::move(t));
        advance(j - i_);
      } else if (auto n = punct_length(); n > 0) {
        out.push_back({Tok::Punct, s_.substr(i_, n), span(n)});
        advance(n);
      } else {
        std::size_t len = 1;
        // Keep multi-byte UTF-8 sequences together in the message.
        while (i_ + len < s_.size() && (static_cast<unsigned char>(s_[i_ + len]) & 0xC0) == 0x80) ++len;
        errors_.push_back({ParseErrorKind::Lexical, span(1), "unexpected character '" + s_.substr(i_, len) + "'"});
        advance(len);
      }
    }
  }

 private:
  std::size_t punct_length() const {
    static const char* two[] = {":=", "->", "!=", "<=", ">="};
    for (const char* t : two)
      if (s_.compare(i_, 2, t) == 0) return 2;
    return std::string_view("{}(),;:!&|=<>+-*").find(s_[i_]) != std::string_view::npos ? 1 : 0;
  }

  void skip_space() {
    while (i_ < s_.size()) {
      if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < s_.size(); ++k, ++i_) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(s_[i_]) & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  SourceSpan span(std::size_t len) const { return {file_, line_, col_, std::max<std::size_t>(len, 1)}; }

  const std::string& s_;
  const std::string& file_;
  std::vector<ParseError>& errors_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;
};

struct SyntaxError {
  ParseError error;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<ParseError>& errors)
      : toks_(std::move(toks)), errors_(errors) {}

  Grafcet run() {
    Grafcet g;
    while (peek_word("input") || peek_word("internal") || peek_word("output")) {
      guarded([&] { var_decl(g); }, Sync::Statement);
    }
    if (at_end()) syntax(cur(), "expected 'partial'");
    while (!at_end()) {
      if (peek_word("partial")) {
        partial(g);
      } else {
        syntax(cur(), "expected 'partial', found '" + cur().text + "'");
        while (!at_end() && !peek_word("partial")) ++pos_;
      }
    }
    resolve(g);
    return g;
  }

 private:
  enum class Sync { Statement, Member };

  struct VarUse {
    std::string name;
    SourceSpan span;
  };
  struct StepUse {
    std::string partial;
    StepId step;
    SourceSpan span;
  };
  struct PartialUse {
    std::string name;
    SourceSpan span;
  };

  const Token& cur() const { return toks_[pos_]; }
  const Token& at(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == Tok::End; }
  bool peek_word(const char* w, std::size_t k = 0) const {
    return at(k).kind == Tok::Ident && at(k).text == w;
  }
  bool peek_punct(const char* p, std::size_t k = 0) const {
    return at(k).kind == Tok::Punct && at(k).text == p;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw SyntaxError{{ParseErrorKind::Syntax, t.span, msg}};
  }
  void syntax(const Token& t, const std::string& msg) {
    errors_.push_back({ParseErrorKind::Syntax, t.span, msg});
  }
  std::string found() const {
    return at_end() ? std::string("end of file") : "'" + cur().text + "'";
  }

  const Token& next() {
    const Token& t = cur();
    if (!at_end()) ++pos_;
    return t;
  }
  void expect_punct(const char* p) {
    if (!peek_punct(p)) fail(cur(), std::string("expected '") + p + "', found " + found());
    ++pos_;
  }
  void expect_word(const char* w) {
    if (!peek_word(w)) fail(cur(), std::string("expected '") + w + "', found " + found());
    ++pos_;
  }
  const Token& ident(const char* what) {
    if (cur().kind != Tok::Ident) fail(cur(), std::string("expected ") + what + ", found " + found());
    return next();
  }
  StepId step_id() {
    if (cur().kind != Tok::Int) fail(cur(), "expected step number, found " + found());
    const auto& t = next();
    if (t.value < 0 || t.value > std::int64_t(UINT32_MAX))
      fail(t, "step number " + t.text + " out of range");
    return static_cast<StepId>(t.value);
  }

  template <typename F>
  void guarded(F&& body, Sync sync) {
    try {
      body();
    } catch (const SyntaxError& e) {
      errors_.push_back(e.error);
      recover(sync);
    }
  }

  // Skips to the end of the broken construct: past the next ';' at the
  // current nesting level, or up to a token that starts a new one.
  void recover(Sync sync) {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0) {
        if (peek_punct(";")) {
          ++pos_;
          return;
        }
        if (peek_word("partial")) return;
        if (sync == Sync::Member && (peek_word("step") || peek_word("transition")) &&
            !peek_punct("(", 1))
          return;
        if (peek_punct("}")) return;
      }
      if (peek_punct("{")) ++depth;
      if (peek_punct("}")) --depth;
      ++pos_;
    }
  }

  void var_decl(Grafcet& g) {
    const auto& kw = next();
    VarKind kind = kw.text == "input" ? VarKind::Input
                   : kw.text == "internal" ? VarKind::Internal
                                           : VarKind::Output;
    Sort sort;
    if (peek_word("bool")) sort = Sort::Boolean;
    else if (peek_word("int")) sort = Sort::Integer;
    else fail(cur(), "expected 'bool' or 'int', found " + found());
    ++pos_;
    do {
      const auto& name = ident("variable name");
      if (!declared_.emplace(name.text, name.span).second)
        errors_.push_back({ParseErrorKind::DuplicateId, name.span, "variable " + name.text + " declared twice"});
      else
        g.variables.push_back({name.text, kind, sort});
    } while (peek_punct(",") && (++pos_, true));
    expect_punct(";");
  }

  void partial(Grafcet& g) {
    ++pos_;
    PartialGrafcet p;
    const Token* name = nullptr;
    try {
      name = &ident("partial name");
      p.name = name->text;
      expect_punct("{");
    } catch (const SyntaxError& e) {
      errors_.push_back(e.error);
      while (!at_end() && !peek_punct("{") && !peek_word("partial")) ++pos_;
      if (!peek_punct("{")) return;
      ++pos_;
    }
    current_ = p.name;
    std::set<StepId> steps;
    std::set<std::string> transitions;
    while (!peek_punct("}")) {
      if (at_end()) {
        syntax(cur(), "expected '}' to close partial " + p.name + ", found end of file");
        break;
      }
      if (peek_word("step")) {
        guarded([&] {
          const auto at_tok = cur();
          auto s = step();
          if (!steps.insert(s.id).second)
            errors_.push_back({ParseErrorKind::DuplicateId, at_tok.span,
                               "step " + std::to_string(s.id) + " defined twice in partial " + p.name});
          else
            p.steps.push_back(std::move(s));
        }, Sync::Member);
      } else if (peek_word("transition")) {
        guarded([&] {
          auto t = transition();
          if (!transitions.insert(t.id).second)
            errors_.push_back({ParseErrorKind::DuplicateId, last_transition_span_,
                               "transition " + t.id + " defined twice in partial " + p.name});
          else
            p.transitions.push_back(std::move(t));
        }, Sync::Member);
      } else if (peek_word("partial")) {
        syntax(cur(), "expected '}' to close partial " + p.name + ", found 'partial'");
        break;
      } else {
        syntax(cur(), "expected 'step' or 'transition', found " + found());
        ++pos_;
        recover(Sync::Member);
      }
    }
    if (peek_punct("}")) ++pos_;
    if (name) {
      if (!partials_.emplace(p.name, name->span).second) {
        errors_.push_back({ParseErrorKind::DuplicateId, name->span, "partial " + p.name + " defined twice"});
        return;
      }
    }
    defined_steps_[p.name] = steps;
    g.partials.push_back(std::move(p));
  }

  Step step() {
    expect_word("step");
    Step s;
    s.id = step_id();
    while (true) {
      if (peek_word("initial")) {
        ++pos_;
        s.initial = true;
      } else if (peek_word("marked")) {
        ++pos_;
        s.marked = true;
      } else if (peek_word("encloses")) {
        ++pos_;
        const auto& t = ident("partial name");
        s.encloses = t.text;
        partial_uses_.push_back({t.text, t.span});
      } else {
        break;
      }
    }
    if (peek_punct("{")) {
      ++pos_;
      while (!peek_punct("}")) {
        if (at_end()) fail(cur(), "expected '}' to close the actions of step " + std::to_string(s.id));
        if (peek_word("step") || peek_word("transition") || peek_word("partial"))
          fail(cur(), "expected '}' to close the actions of step " + std::to_string(s.id) +
                          ", found " + found());
        guarded([&] { s.actions.push_back(action()); }, Sync::Statement);
      }
      ++pos_;
    }
    if (peek_punct(";")) ++pos_;
    return s;
  }

  Action action() {
    if (peek_word("do")) {
      ++pos_;
      ContinuousAction a;
      const auto& t = ident("output variable");
      a.target = t.text;
      var_uses_.push_back({t.text, t.span});
      if (peek_word("if")) {
        ++pos_;
        a.condition = expr();
      }
      expect_punct(";");
      return a;
    }
    if (peek_word("store")) {
      ++pos_;
      StoredAction a;
      const auto& t = ident("variable");
      a.target = t.text;
      var_uses_.push_back({t.text, t.span});
      expect_punct(":=");
      a.value = expr();
      expect_word("on");
      if (peek_word("activation")) {
        ++pos_;
        a.trigger = TriggerKind::OnActivation;
      } else if (peek_word("deactivation")) {
        ++pos_;
        a.trigger = TriggerKind::OnDeactivation;
      } else if (peek_word("event")) {
        ++pos_;
        a.trigger = TriggerKind::OnEvent;
        a.event = expr();
      } else {
        fail(cur(), "expected 'activation', 'deactivation' or 'event', found " + found());
      }
      expect_punct(";");
      return a;
    }
    if (peek_word("force")) {
      ++pos_;
      ForcingAction a;
      const auto& t = ident("partial name");
      a.target_partial = t.text;
      partial_uses_.push_back({t.text, t.span});
      expect_word("to");
      if (peek_punct("*")) {
        ++pos_;
        a.situation = SituationKind::Star;
      } else if (peek_word("init")) {
        ++pos_;
        a.situation = SituationKind::Init;
      } else if (peek_punct("{")) {
        a.situation = SituationKind::Explicit;
        a.steps = step_list(t.text);
      } else {
        fail(cur(), "expected '*', 'init' or a step list, found " + found());
      }
      expect_punct(";");
      return a;
    }
    fail(cur(), "expected 'do', 'store' or 'force', found " + found());
  }

  std::vector<StepId> step_list(const std::string& partial) {
    expect_punct("{");
    std::vector<StepId> out;
    if (!peek_punct("}")) {
      do {
        const auto t = cur();
        out.push_back(step_id());
        step_uses_.push_back({partial, out.back(), t.span});
      } while (peek_punct(",") && (++pos_, true));
    }
    expect_punct("}");
    return out;
  }

  Transition transition() {
    expect_word("transition");
    Transition t;
    const auto& name = ident("transition name");
    t.id = name.text;
    last_transition_span_ = name.span;
    expect_punct(":");
    t.upstream = step_list(current_);
    expect_punct("->");
    t.downstream = step_list(current_);
    expect_word("when");
    t.condition = expr();
    expect_punct(";");
    return t;
  }

  Expr expr() {
    Expr e = conj();
    while (peek_punct("|")) {
      ++pos_;
      e = Expr::disj(e, conj());
    }
    return e;
  }

  Expr conj() {
    Expr e = comparison();
    while (peek_punct("&")) {
      ++pos_;
      e = Expr::conj(e, comparison());
    }
    return e;
  }

  Expr comparison() {
    static const std::map<std::string, CompareOp> ops = {
        {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
        {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {">=", CompareOp::Ge}};
    Expr e = sum();
    while (cur().kind == Tok::Punct && ops.count(cur().text)) {
      const auto op = ops.at(next().text);
      e = Expr::compare(op, e, sum());
    }
    return e;
  }

  Expr sum() {
    Expr e = product();
    while (peek_punct("+") || peek_punct("-")) {
      const auto op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
      e = Expr::arith(op, e, product());
    }
    return e;
  }

  Expr product() {
    Expr e = unary();
    while (peek_punct("*")) {
      ++pos_;
      e = Expr::arith(ArithOp::Mul, e, unary());
    }
    return e;
  }

  Expr unary() {
    if (peek_punct("!")) {
      ++pos_;
      return Expr::negate(unary());
    }
    if (peek_punct("-")) {
      ++pos_;
      if (cur().kind == Tok::Int) return Expr::integer(-next().value);
      return Expr::arith(ArithOp::Sub, Expr::integer(0), unary());
    }
    return primary();
  }

  Expr primary() {
    const auto& t = cur();
    if (t.kind == Tok::Int) {
      ++pos_;
      return Expr::integer(t.value);
    }
    if (peek_punct("(")) {
      ++pos_;
      Expr e = expr();
      expect_punct(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t, "expected an expression, found " + found());
    if (t.text == "true" || t.text == "false") {
      ++pos_;
      return Expr::boolean(t.text == "true");
    }
    if (peek_punct("(", 1)) {
      if (t.text == "rising" || t.text == "up" || t.text == "falling" || t.text == "down") {
        const auto dir = t.text == "rising" || t.text == "up" ? EdgeDir::Rising : EdgeDir::Falling;
        pos_ += 2;
        Expr operand = expr();
        expect_punct(")");
        return Expr::edge(dir, operand);
      }
      if (t.text == "step") {
        pos_ += 2;
        const auto& p = ident("partial name");
        expect_punct(",");
        const auto s = cur();
        const auto id = step_id();
        expect_punct(")");
        step_uses_.push_back({p.text, id, s.span});
        partial_uses_.push_back({p.text, p.span});
        return Expr::step(p.text, id);
      }
      fail(t, "unknown function '" + t.text + "'");
    }
    ++pos_;
    var_uses_.push_back({t.text, t.span});
    return Expr::var(t.text);
  }

  void resolve(const Grafcet&) {
    for (const auto& u : var_uses_)
      if (!declared_.count(u.name))
        errors_.push_back({ParseErrorKind::UnknownReference, u.span, "undeclared variable " + u.name});
    for (const auto& u : partial_uses_)
      if (!partials_.count(u.name))
        errors_.push_back({ParseErrorKind::UnknownReference, u.span, "unknown partial " + u.name});
    for (const auto& u : step_uses_) {
      auto it = defined_steps_.find(u.partial);
      if (it != defined_steps_.end() && !it->second.count(u.step))
        errors_.push_back({ParseErrorKind::UnknownReference, u.span,
                           "unknown step " + std::to_string(u.step) + " in partial " + u.partial});
    }
  }

  std::vector<Token> toks_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  std::string current_;
  SourceSpan last_transition_span_;
  std::map<std::string, SourceSpan> declared_;
  std::map<std::string, SourceSpan> partials_;
  std::map<std::string, std::set<StepId>> defined_steps_;
  std::vector<VarUse> var_uses_;
  std::vector<StepUse> step_uses_;
  std::vector<PartialUse> partial_uses_;
};

}  // namespace

ParseResult parse_file(const std::string& text, const std::string& file) {
  ParseResult r;
  auto tokens = Lexer(text, file, r.errors).run();
  auto g = Parser(std::move(tokens), r.errors).run();
  std::stable_sort(r.errors.begin(), r.errors.end(), [](const ParseError& a, const ParseError& b) {
    return std::tie(a.span.line, a.span.column) < std::tie(b.span.line, b.span.column);
  });
  if (r.errors.empty()) r.model = std::move(g);
  return r;
}

}  // namespace grafcet
