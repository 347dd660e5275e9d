// SPDX-License-Identifier: Apache-2.0

#include "sirl/lp_model.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "sirl/solver.hpp"

namespace sirl {

SyntaxError::SyntaxError(const std::string& what, int line, int column)
    : std::runtime_error("SyntaxError: " + what + " (line " +
                         std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

DuplicateVariableTypeError::DuplicateVariableTypeError(const std::string& var,
                                                       int line, int column)
    : std::runtime_error("DuplicateVariableTypeError: variable '" + var +
                         "' declared in two type sections (line " +
                         std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class TokKind { Number, Ident, Op, End };

struct Token {
  TokKind kind{TokKind::End};
  std::string text;
  double value{0.0};  // for Number
  int line{0};
  int col{0};
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Tokenizes expression content. Operators are single chars except <=, >=,
// =<, =>, == which collapse to <=, >=, =.
class Lexer {
 public:
  Lexer(const std::string& text, int line, int col_base)
      : text_(text), line_(line), col_base_(col_base) {
    next();
  }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  bool at_end() const { return tok_.kind == TokKind::End; }

 private:
  void next() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_base_ + static_cast<int>(pos_);
    if (pos_ >= text_.size()) {
      tok_.kind = TokKind::End;
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.'))
        ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        size_t mark = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
          ++pos_;
        if (pos_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        } else {
          pos_ = mark;  // 'e' starts an identifier, not an exponent
        }
      }
      tok_.kind = TokKind::Number;
      tok_.text = text_.substr(start, pos_ - start);
      tok_.value = std::strtod(tok_.text.c_str(), nullptr);
      return;
    }
    if (is_ident_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      tok_.kind = TokKind::Ident;
      tok_.text = text_.substr(start, pos_ - start);
      return;
    }
    // operator
    tok_.kind = TokKind::Op;
    if ((c == '<' || c == '>' || c == '=') && pos_ + 1 < text_.size()) {
      char d = text_[pos_ + 1];
      if ((c == '<' && d == '=') || (c == '=' && d == '<')) {
        tok_.text = "<=";
        pos_ += 2;
        return;
      }
      if ((c == '>' && d == '=') || (c == '=' && d == '>')) {
        tok_.text = ">=";
        pos_ += 2;
        return;
      }
      if (c == '=' && d == '=') {
        tok_.text = "=";
        pos_ += 2;
        return;
      }
    }
    if (c == '<') {
      tok_.text = "<=";
      ++pos_;
      return;
    }
    if (c == '>') {
      tok_.text = ">=";
      ++pos_;
      return;
    }
    tok_.text = std::string(1, c);
    ++pos_;
  }

  const std::string& text_;
  int line_;
  int col_base_;
  size_t pos_{0};
  Token tok_;
};

struct SourceLine {
  int number{0};
  std::string text;
};

enum class Section {
  Pre,
  Objective,
  Constraints,
  Bounds,
  Generals,
  Binaries,
  Done
};

struct BoundState {
  double lower{0.0};
  double upper{kInfinity};
  bool lower_set{false};
  bool upper_set{false};
  int line{0};
  int col{0};
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  InstanceModel run() {
    split_lines();
    size_t i = 0;
    bool saw_objective = false;
    bool saw_constraints = false;
    bool saw_bounds = false;
    bool saw_generals = false;
    bool saw_binaries = false;
    Section section = Section::Pre;
    std::vector<SourceLine> pending;  // content lines of the open section
    int section_line = 1;

    auto flush = [&]() {
      switch (section) {
        case Section::Objective:
          parse_objective(pending);
          break;
        case Section::Constraints:
          parse_constraints(pending);
          break;
        case Section::Bounds:
          for (const auto& l : pending) parse_bound_line(l);
          break;
        case Section::Generals:
          for (const auto& l : pending)
            parse_type_line(l, VarKind::GeneralInteger);
          break;
        case Section::Binaries:
          for (const auto& l : pending) parse_type_line(l, VarKind::Binary);
          break;
        default:
          break;
      }
      pending.clear();
    };

    for (; i < lines_.size(); ++i) {
      const SourceLine& ln = lines_[i];
      std::string rest;
      Section next = classify(ln, &rest);
      if (next == Section::Pre) {  // not a section header: content
        if (section == Section::Pre) {
          Lexer lex(ln.text, ln.number, 1);
          if (!lex.at_end())
            throw SyntaxError("expected 'Maximize' or 'Minimize', got '" +
                                  lex.peek().text + "'",
                              lex.peek().line, lex.peek().col);
          continue;
        }
        if (section == Section::Done) continue;  // text after End is ignored
        pending.push_back(ln);
        continue;
      }
      // section header
      switch (next) {
        case Section::Objective:
          if (saw_objective)
            throw SyntaxError("duplicate objective section", ln.number, 1);
          if (section != Section::Pre)
            throw SyntaxError("objective section must come first", ln.number,
                              1);
          saw_objective = true;
          break;
        case Section::Constraints:
          if (!saw_objective)
            throw SyntaxError("'Subject To' before objective section",
                              ln.number, 1);
          if (saw_constraints)
            throw SyntaxError("duplicate 'Subject To' section", ln.number, 1);
          if (section != Section::Objective)
            throw SyntaxError("'Subject To' must follow the objective",
                              ln.number, 1);
          saw_constraints = true;
          break;
        case Section::Bounds:
          if (!saw_objective)
            throw SyntaxError("'Bounds' before objective section", ln.number,
                              1);
          if (saw_bounds)
            throw SyntaxError("duplicate 'Bounds' section", ln.number, 1);
          saw_bounds = true;
          break;
        case Section::Generals:
          if (!saw_objective)
            throw SyntaxError("type section before objective section",
                              ln.number, 1);
          if (saw_generals)
            throw SyntaxError("duplicate integer type section", ln.number, 1);
          saw_generals = true;
          break;
        case Section::Binaries:
          if (!saw_objective)
            throw SyntaxError("type section before objective section",
                              ln.number, 1);
          if (saw_binaries)
            throw SyntaxError("duplicate binary type section", ln.number, 1);
          saw_binaries = true;
          break;
        case Section::Done:
          break;
        default:
          break;
      }
      flush();
      section = next;
      section_line = ln.number;
      if (!rest.empty() && next != Section::Done) {
        SourceLine cont;
        cont.number = ln.number;
        cont.text = rest;
        pending.push_back(cont);
      }
    }
    flush();
    (void)section_line;

    if (!saw_objective) {
      if (lines_.empty()) throw SyntaxError("empty input", 1, 1);
      throw SyntaxError("missing objective section", 1, 1);
    }
    finalize();
    return std::move(model_);
  }

 private:
  void split_lines() {
    std::string cur;
    int number = 1;
    auto push = [&]() {
      // drop comment lines (first non-blank char is '\')
      size_t k = cur.find_first_not_of(" \t\r");
      bool comment = k != std::string::npos && cur[k] == '\\';
      bool blank = k == std::string::npos;
      if (!comment && !blank) lines_.push_back({number, cur});
      cur.clear();
      ++number;
    };
    for (char c : text_) {
      if (c == '\n') {
        push();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) push();
  }

  // Returns the section a line opens, or Section::Pre when it is content.
  // `rest` receives any content that follows the keyword on the same line.
  Section classify(const SourceLine& ln, std::string* rest) {
    Lexer lex(ln.text, ln.number, 1);
    if (lex.peek().kind != TokKind::Ident) return Section::Pre;
    Token first = lex.peek();
    std::string w = lower(first.text);
    auto remainder_after = [&](Lexer& l) {
      l.take();
      // everything after current token position
      size_t off = static_cast<size_t>(l.peek().col - 1);
      if (l.peek().kind == TokKind::End) return std::string();
      return ln.text.substr(off);
    };
    if (w == "maximize" || w == "max" || w == "maximise") {
      objective_direction_ = Direction::Maximize;
      *rest = remainder_after(lex);
      return Section::Objective;
    }
    if (w == "minimize" || w == "min" || w == "minimise") {
      objective_direction_ = Direction::Minimize;
      *rest = remainder_after(lex);
      return Section::Objective;
    }
    if (w == "subject" || w == "such") {
      Lexer l2(ln.text, ln.number, 1);
      l2.take();
      if (l2.peek().kind == TokKind::Ident) {
        std::string w2 = lower(l2.peek().text);
        if ((w == "subject" && w2 == "to") || (w == "such" && w2 == "that")) {
          *rest = remainder_after(l2);
          return Section::Constraints;
        }
      }
      return Section::Pre;
    }
    if (w == "st" || w == "s") {
      // "st", "s.t." as a standalone line
      std::string whole = lower(ln.text);
      std::string trimmed;
      for (char c : whole)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
      if (trimmed == "st" || trimmed == "st." || trimmed == "s.t." ||
          trimmed == "s.t") {
        rest->clear();
        return Section::Constraints;
      }
      return Section::Pre;
    }
    if (w == "bounds" || w == "bound") {
      *rest = remainder_after(lex);
      return Section::Bounds;
    }
    if (w == "generals" || w == "general" || w == "integers") {
      *rest = remainder_after(lex);
      return Section::Generals;
    }
    if (w == "binary" || w == "binaries") {
      *rest = remainder_after(lex);
      return Section::Binaries;
    }
    if (w == "end") {
      Lexer l2(ln.text, ln.number, 1);
      l2.take();
      if (l2.at_end()) {
        rest->clear();
        return Section::Done;
      }
      throw SyntaxError("unexpected text after 'End'", l2.peek().line,
                        l2.peek().col);
    }
    return Section::Pre;
  }

  void touch(const std::string& name) {
    if (!seen_.count(name)) {
      seen_.insert(name);
      model_.variable_order.push_back(name);
    }
  }

  struct Expr {
    std::vector<LinearTerm> terms;  // duplicates merged, original order
    double constant{0.0};
  };

  // Parses a linear expression with optional quadratic brackets until a
  // relational operator or end of input.
  Expr parse_expression(Lexer& lex, bool allow_quad) {
    Expr out;
    std::map<std::string, size_t> index;
    auto add_term = [&](double coeff, const std::string& var) {
      auto it = index.find(var);
      if (it == index.end()) {
        index[var] = out.terms.size();
        out.terms.push_back({coeff, var});
      } else {
        out.terms[it->second].coeff += coeff;
      }
      touch(var);
    };

    bool any = false;
    while (true) {
      const Token& t = lex.peek();
      if (t.kind == TokKind::End) break;
      if (t.kind == TokKind::Op && (t.text == "<=" || t.text == ">=" || t.text == "="))
        break;
      double sign = 1.0;
      bool saw_sign = false;
      if (t.kind == TokKind::Op && (t.text == "+" || t.text == "-")) {
        sign = t.text == "-" ? -1.0 : 1.0;
        saw_sign = true;
        lex.take();
      }
      const Token& u = lex.peek();
      if (u.kind == TokKind::End) {
        if (saw_sign)
          throw SyntaxError("dangling sign at end of expression", t.line,
                            t.col);
        break;
      }
      if (u.kind == TokKind::Op && u.text == "[") {
        if (!allow_quad)
          throw SyntaxError("unexpected '['", u.line, u.col);
        lex.take();
        parse_quadratic(lex, sign);
        any = true;
        continue;
      }
      if (u.kind == TokKind::Number) {
        Token num = lex.take();
        const Token& v = lex.peek();
        if (v.kind == TokKind::Op && v.text == "*") {
          lex.take();
          if (lex.peek().kind != TokKind::Ident)
            throw SyntaxError("expected variable after '*'", lex.peek().line,
                              lex.peek().col);
          Token var = lex.take();
          add_term(sign * num.value, var.text);
        } else if (v.kind == TokKind::Ident) {
          Token var = lex.take();
          add_term(sign * num.value, var.text);
        } else {
          out.constant += sign * num.value;
        }
        any = true;
        continue;
      }
      if (u.kind == TokKind::Ident) {
        Token var = lex.take();
        add_term(sign, var.text);
        any = true;
        continue;
      }
      throw SyntaxError("malformed term: unexpected '" + u.text + "'", u.line,
                        u.col);
    }
    (void)any;
    return out;
  }

  // Content between '[' and ']', optionally followed by "/ N".
  // Parsed permissively: recognizable terms are recorded, the rest skipped.
  void parse_quadratic(Lexer& lex, double outer_sign) {
    model_.nonlinear_flag = true;
    std::vector<QuadTerm> local;
    double sign = outer_sign;
    while (true) {
      const Token& t = lex.peek();
      if (t.kind == TokKind::End)
        throw SyntaxError("unterminated quadratic section", t.line, t.col);
      if (t.kind == TokKind::Op && t.text == "]") {
        lex.take();
        break;
      }
      if (t.kind == TokKind::Op && (t.text == "+" || t.text == "-")) {
        sign = outer_sign * (t.text == "-" ? -1.0 : 1.0);
        lex.take();
        continue;
      }
      double coeff = sign;
      if (t.kind == TokKind::Number) coeff *= lex.take().value;
      if (lex.peek().kind == TokKind::Op && lex.peek().text == "*") lex.take();
      if (lex.peek().kind != TokKind::Ident) {
        lex.take();  // permissive: skip unrecognized token
        sign = outer_sign;
        continue;
      }
      std::string v1 = lex.take().text;
      std::string v2 = v1;
      if (lex.peek().kind == TokKind::Op && lex.peek().text == "^") {
        lex.take();
        if (lex.peek().kind == TokKind::Number) lex.take();  // the exponent
      } else if (lex.peek().kind == TokKind::Op && lex.peek().text == "*") {
        lex.take();
        if (lex.peek().kind == TokKind::Ident) v2 = lex.take().text;
      }
      touch(v1);
      touch(v2);
      local.push_back({coeff, v1, v2});
      sign = outer_sign;
    }
    if (lex.peek().kind == TokKind::Op && lex.peek().text == "/") {
      lex.take();
      if (lex.peek().kind != TokKind::Number)
        throw SyntaxError("expected divisor after '/'", lex.peek().line,
                          lex.peek().col);
      double d = lex.take().value;
      if (d == 0.0)
        throw SyntaxError("zero divisor in quadratic section",
                          lex.peek().line, lex.peek().col);
      for (auto& q : local) q.coeff /= d;
    }
    for (auto& q : local) model_.quad_terms.push_back(std::move(q));
  }

  void parse_objective(const std::vector<SourceLine>& content) {
    model_.direction = objective_direction_;
    std::string joined;
    int first_line = content.empty() ? 1 : content.front().number;
    for (const auto& l : content) {
      joined += l.text;
      joined += ' ';
    }
    Lexer lex(joined, first_line, 1);
    // optional "name:" prefix
    if (lex.peek().kind == TokKind::Ident) {
      Lexer probe = lex;
      probe.take();
      if (probe.peek().kind == TokKind::Op && probe.peek().text == ":") {
        lex.take();
        lex.take();
      }
    }
    Expr e = parse_expression(lex, /*allow_quad=*/true);
    if (!lex.at_end())
      throw SyntaxError("unexpected '" + lex.peek().text + "' in objective",
                        lex.peek().line, lex.peek().col);
    model_.objective = std::move(e.terms);
    model_.objective_constant = e.constant;
  }

  void parse_constraints(const std::vector<SourceLine>& content) {
    // Constraints may span lines; a new constraint starts where the previous
    // one is complete. Join everything and split on complete statements.
    std::string joined;
    int first_line = content.empty() ? 1 : content.front().number;
    for (const auto& l : content) {
      joined += l.text;
      joined += '\n';
    }
    Lexer lex(joined, first_line, 1);
    while (!lex.at_end()) {
      Constraint c;
      // optional "name :"
      if (lex.peek().kind == TokKind::Ident) {
        Lexer probe = lex;
        probe.take();
        if (probe.peek().kind == TokKind::Op && probe.peek().text == ":") {
          c.name = lex.take().text;
          lex.take();
        }
      }
      Token start = lex.peek();
      Expr e = parse_expression(lex, /*allow_quad=*/true);
      if (lex.at_end())
        throw SyntaxError("constraint missing relational operator", start.line,
                          start.col);
      Token rel = lex.take();
      if (rel.text == "<=")
        c.sense = Sense::LessEqual;
      else if (rel.text == ">=")
        c.sense = Sense::GreaterEqual;
      else
        c.sense = Sense::Equal;
      const Token& rt = lex.peek();
      double rhs_sign = 1.0;
      if (rt.kind == TokKind::Op && (rt.text == "+" || rt.text == "-")) {
        rhs_sign = rt.text == "-" ? -1.0 : 1.0;
        lex.take();
      }
      if (lex.peek().kind != TokKind::Number)
        throw SyntaxError("expected numeric right-hand side",
                          lex.peek().line, lex.peek().col);
      Token rhs = lex.take();
      c.rhs = rhs_sign * rhs.value - e.constant;
      c.terms = std::move(e.terms);
      if (c.terms.empty())
        throw SyntaxError("constraint has no variables", start.line,
                          start.col);
      model_.constraints.push_back(std::move(c));
    }
  }

  static bool parse_inf(const std::string& word, double* out) {
    std::string w = lower(word);
    if (w == "inf" || w == "infinity") {
      *out = kInfinity;
      return true;
    }
    return false;
  }

  // One bound value: [+|-] (number | inf | infinity)
  bool take_bound_value(Lexer& lex, double* out) {
    double sign = 1.0;
    Lexer probe = lex;
    if (probe.peek().kind == TokKind::Op &&
        (probe.peek().text == "+" || probe.peek().text == "-")) {
      sign = probe.peek().text == "-" ? -1.0 : 1.0;
      probe.take();
    }
    if (probe.peek().kind == TokKind::Number) {
      lex = probe;
      *out = sign * lex.take().value;
      return true;
    }
    if (probe.peek().kind == TokKind::Ident) {
      double inf;
      if (parse_inf(probe.peek().text, &inf)) {
        lex = probe;
        lex.take();
        *out = sign * inf;
        return true;
      }
    }
    return false;
  }

  BoundState& bound_state(const std::string& name, int line, int col) {
    touch(name);
    auto it = bound_states_.find(name);
    if (it == bound_states_.end())
      it = bound_states_.emplace(name, BoundState{}).first;
    it->second.line = line;
    it->second.col = col;
    return it->second;
  }

  void parse_bound_line(const SourceLine& ln) {
    Lexer lex(ln.text, ln.number, 1);
    double lo;
    if (take_bound_value(lex, &lo)) {
      // form: l <= x [<= u]   (or l >= x [>= u])
      if (lex.peek().kind != TokKind::Op ||
          (lex.peek().text != "<=" && lex.peek().text != ">="))
        throw SyntaxError("malformed bound", lex.peek().line, lex.peek().col);
      bool le = lex.take().text == "<=";
      if (lex.peek().kind != TokKind::Ident)
        throw SyntaxError("expected variable in bound", lex.peek().line,
                          lex.peek().col);
      Token var = lex.take();
      BoundState& b = bound_state(var.text, var.line, var.col);
      if (le) {
        b.lower = lo;
        b.lower_set = true;
      } else {
        b.upper = lo;
        b.upper_set = true;
      }
      if (!lex.at_end()) {
        if (lex.peek().kind != TokKind::Op || lex.peek().text != (le ? "<=" : ">="))
          throw SyntaxError("malformed bound", lex.peek().line,
                            lex.peek().col);
        lex.take();
        double hi;
        if (!take_bound_value(lex, &hi))
          throw SyntaxError("expected bound value", lex.peek().line,
                            lex.peek().col);
        if (le) {
          b.upper = hi;
          b.upper_set = true;
        } else {
          b.lower = hi;
          b.lower_set = true;
        }
      }
      if (!lex.at_end())
        throw SyntaxError("unexpected '" + lex.peek().text + "' in bound",
                          lex.peek().line, lex.peek().col);
      return;
    }
    if (lex.peek().kind != TokKind::Ident)
      throw SyntaxError("malformed bound", lex.peek().line, lex.peek().col);
    Token var = lex.take();
    if (lex.peek().kind == TokKind::Ident &&
        lower(lex.peek().text) == "free") {
      lex.take();
      if (!lex.at_end())
        throw SyntaxError("unexpected text after 'free'", lex.peek().line,
                          lex.peek().col);
      BoundState& b = bound_state(var.text, var.line, var.col);
      b.lower = -kInfinity;
      b.upper = kInfinity;
      b.lower_set = b.upper_set = true;
      return;
    }
    if (lex.peek().kind != TokKind::Op)
      throw SyntaxError("malformed bound", lex.peek().line, lex.peek().col);
    std::string rel = lex.take().text;
    double v;
    if (!take_bound_value(lex, &v))
      throw SyntaxError("expected bound value", lex.peek().line,
                        lex.peek().col);
    if (!lex.at_end())
      throw SyntaxError("unexpected '" + lex.peek().text + "' in bound",
                        lex.peek().line, lex.peek().col);
    BoundState& b = bound_state(var.text, var.line, var.col);
    if (rel == "<=") {
      b.upper = v;
      b.upper_set = true;
    } else if (rel == ">=") {
      b.lower = v;
      b.lower_set = true;
    } else if (rel == "=") {
      b.lower = b.upper = v;
      b.lower_set = b.upper_set = true;
    } else {
      throw SyntaxError("malformed bound relation '" + rel + "'", var.line,
                        var.col);
    }
  }

  void parse_type_line(const SourceLine& ln, VarKind kind) {
    Lexer lex(ln.text, ln.number, 1);
    while (!lex.at_end()) {
      if (lex.peek().kind != TokKind::Ident)
        throw SyntaxError("expected variable name in type section",
                          lex.peek().line, lex.peek().col);
      Token var = lex.take();
      auto it = declared_kind_.find(var.text);
      if (it != declared_kind_.end() && it->second != kind)
        throw DuplicateVariableTypeError(var.text, var.line, var.col);
      declared_kind_[var.text] = kind;
      touch(var.text);
    }
  }

  void finalize() {
    for (const std::string& name : model_.variable_order) {
      VarKind kind = VarKind::Continuous;
      auto kit = declared_kind_.find(name);
      if (kit != declared_kind_.end()) kind = kit->second;
      model_.var_kind[name] = kind;

      VarBounds vb;
      auto bit = bound_states_.find(name);
      int line = 0, col = 0;
      if (bit != bound_states_.end()) {
        const BoundState& b = bit->second;
        vb.lower = b.lower;
        vb.upper = b.upper;
        line = b.line;
        col = b.col;
        // LP convention: a sole negative upper bound frees the lower bound
        if (b.upper_set && !b.lower_set && vb.upper < 0.0)
          vb.lower = -kInfinity;
      }
      if (kind == VarKind::Binary) {
        vb.lower = std::max(vb.lower, 0.0);
        vb.upper = std::min(vb.upper, 1.0);
      }
      if (vb.lower > vb.upper)
        throw SyntaxError("inconsistent bounds for variable '" + name + "'",
                          line == 0 ? 1 : line, col == 0 ? 1 : col);
      model_.bounds[name] = vb;
    }
  }

  const std::string& text_;
  std::vector<SourceLine> lines_;
  InstanceModel model_;
  Direction objective_direction_{Direction::Minimize};
  std::unordered_map<std::string, BoundState> bound_states_;
  std::unordered_map<std::string, VarKind> declared_kind_;
  std::unordered_map<std::string, int> seen_index_;
  std::set<std::string> seen_;
};

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void append_terms(std::string& out, const std::vector<LinearTerm>& terms,
                  bool leading) {
  bool first = leading;
  for (const auto& t : terms) {
    double c = t.coeff;
    if (first) {
      if (c < 0) {
        out += "- ";
        c = -c;
      }
      first = false;
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    if (c != 1.0) {
      out += format_number(c);
      out += ' ';
    }
    out += t.var;
  }
}

}  // namespace

InstanceModel parse_lp(const std::string& text) {
  Parser p(text);
  return p.run();
}

std::string write_lp(const InstanceModel& model) {
  std::string out;
  out += model.direction == Direction::Maximize ? "Maximize\n" : "Minimize\n";
  out += "  ";
  append_terms(out, model.objective, true);
  if (!model.quad_terms.empty()) {
    if (!model.objective.empty()) out += " + ";
    out += "[ ";
    bool first = true;
    for (const auto& q : model.quad_terms) {
      double c = q.coeff;
      if (first) {
        if (c < 0) {
          out += "- ";
          c = -c;
        }
        first = false;
      } else {
        out += c < 0 ? " - " : " + ";
        if (c < 0) c = -c;
      }
      if (c != 1.0) {
        out += format_number(c);
        out += ' ';
      }
      if (q.var1 == q.var2) {
        out += q.var1 + " ^ 2";
      } else {
        out += q.var1 + " * " + q.var2;
      }
    }
    out += " ]";
  }
  if (model.objective_constant != 0.0) {
    if (!model.objective.empty() || !model.quad_terms.empty()) {
      out += model.objective_constant < 0 ? " - " : " + ";
      out += format_number(std::abs(model.objective_constant));
    } else {
      out += format_number(model.objective_constant);
    }
  } else if (model.objective.empty() && model.quad_terms.empty()) {
    out += "0";
  }
  out += '\n';

  out += "Subject To\n";
  for (const auto& c : model.constraints) {
    out += "  ";
    if (!c.name.empty()) {
      out += c.name;
      out += ": ";
    }
    append_terms(out, c.terms, true);
    switch (c.sense) {
      case Sense::LessEqual:
        out += " <= ";
        break;
      case Sense::GreaterEqual:
        out += " >= ";
        break;
      case Sense::Equal:
        out += " = ";
        break;
    }
    out += format_number(c.rhs);
    out += '\n';
  }

  out += "Bounds\n";
  for (const std::string& name : model.variable_order) {
    const VarBounds& b = model.bounds.at(name);
    VarKind kind = model.var_kind.at(name);
    const bool default_bounds = b.lower == 0.0 && b.upper == kInfinity;
    const bool binary_default =
        kind == VarKind::Binary && b.lower == 0.0 && b.upper == 1.0;
    if (default_bounds || binary_default) continue;
    out += "  ";
    if (b.lower == -kInfinity && b.upper == kInfinity) {
      out += name + " free";
    } else if (b.lower == b.upper) {
      out += name + " = " + format_number(b.lower);
    } else if (b.upper == kInfinity) {
      out += name + " >= " + format_number(b.lower);
    } else if (b.lower == 0.0 && b.upper >= 0.0) {
      out += name + " <= " + format_number(b.upper);
    } else {
      out += (b.lower == -kInfinity ? std::string("-inf")
                                    : format_number(b.lower)) +
             " <= " + name + " <= " + format_number(b.upper);
    }
    out += '\n';
  }

  bool any_general = false, any_binary = false;
  for (const std::string& name : model.variable_order) {
    VarKind k = model.var_kind.at(name);
    any_general |= k == VarKind::GeneralInteger;
    any_binary |= k == VarKind::Binary;
  }
  if (any_general) {
    out += "Generals\n";
    for (const std::string& name : model.variable_order)
      if (model.var_kind.at(name) == VarKind::GeneralInteger)
        out += "  " + name + "\n";
  }
  if (any_binary) {
    out += "Binary\n";
    for (const std::string& name : model.variable_order)
      if (model.var_kind.at(name) == VarKind::Binary) out += "  " + name + "\n";
  }
  out += "End\n";
  return out;
}

void validate(const InstanceModel& model) {
  std::set<std::string> names(model.variable_order.begin(),
                              model.variable_order.end());
  if (names.size() != model.variable_order.size())
    throw std::invalid_argument("duplicate variable names");
  auto check_ref = [&](const std::string& v) {
    if (!model.bounds.count(v) || !model.var_kind.count(v) || !names.count(v))
      throw std::invalid_argument("variable '" + v +
                                  "' missing bounds or kind");
  };
  for (const auto& t : model.objective) check_ref(t.var);
  for (const auto& c : model.constraints) {
    if (c.terms.empty())
      throw std::invalid_argument("constraint with no terms");
    std::set<std::string> in_constraint;
    for (const auto& t : c.terms) {
      check_ref(t.var);
      if (!in_constraint.insert(t.var).second)
        throw std::invalid_argument("duplicate variable in constraint");
    }
  }
  for (const auto& q : model.quad_terms) {
    check_ref(q.var1);
    check_ref(q.var2);
  }
  for (const std::string& name : model.variable_order) {
    const VarBounds& b = model.bounds.at(name);
    if (!(b.lower <= b.upper))
      throw std::invalid_argument("lower > upper for '" + name + "'");
    if (model.var_kind.at(name) == VarKind::Binary &&
        (b.lower < 0.0 || b.upper > 1.0))
      throw std::invalid_argument("binary variable '" + name +
                                  "' outside [0, 1]");
  }
}

int count_kind(const InstanceModel& model, VarKind kind) {
  int n = 0;
  for (const std::string& name : model.variable_order)
    if (model.var_kind.at(name) == kind) ++n;
  return n;
}

InstanceFeatures extract_features(const InstanceModel& model,
                                  const SolveOutcome& outcome) {
  InstanceFeatures f;
  f.direction = model.direction;
  f.n_binary = count_kind(model, VarKind::Binary);
  f.n_general_integer = count_kind(model, VarKind::GeneralInteger);
  if (outcome.status == SolveStatus::Optimal) f.objective_value = outcome.objective;
  return f;
}

}  // namespace sirl
