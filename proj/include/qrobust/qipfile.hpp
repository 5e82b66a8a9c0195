#pragma once

// Reader and writer for the .qlp text format: an LP-style file with an
// optional universal constraint section and an ORDER section that assigns
// variables to quantifier blocks. See docs/format.md for the grammar.

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrobust/dep.hpp"
#include "qrobust/model.hpp"

namespace qrobust {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(ValidationReport report)
      : std::runtime_error("invalid instance: " + report.summary()), report_(std::move(report)) {}
  explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
  [[nodiscard]] const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

enum class Tok { Ident, Number, Colon, Plus, Minus, Le, Ge, Eq, Slash, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\\') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
      continue;
    }
    const int l = line;
    const int k = col;
    if (text.substr(i, 3) == "\xE2\x88\x92") {  // U+2212 minus sign
      out.push_back(Token{Tok::Minus, "-", l, k});
      i += 3;
      ++col;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back(Token{Tok::Ident, std::string(text.substr(i, j - i)), l, k});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])) != 0)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) ++j;
      if (j < text.size() && (text[j] == '.' || text[j] == '/') && j + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[j + 1])) != 0) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) ++j;
      }
      if (j < text.size() && ident_start(text[j])) throw ParseError(l, k, "malformed number");
      out.push_back(Token{Tok::Number, std::string(text.substr(i, j - i)), l, k});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < text.size() && text[i + 1] == b; };
    if (two('<', '=') || two('=', '<')) {
      out.push_back(Token{Tok::Le, "<=", l, k});
      advance(2);
    } else if (two('>', '=') || two('=', '>')) {
      out.push_back(Token{Tok::Ge, ">=", l, k});
      advance(2);
    } else if (c == '<') {
      out.push_back(Token{Tok::Le, "<=", l, k});
      advance(1);
    } else if (c == '>') {
      out.push_back(Token{Tok::Ge, ">=", l, k});
      advance(1);
    } else if (c == '=') {
      out.push_back(Token{Tok::Eq, "=", l, k});
      advance(1);
    } else if (c == ':') {
      out.push_back(Token{Tok::Colon, ":", l, k});
      advance(1);
    } else if (c == '+') {
      out.push_back(Token{Tok::Plus, "+", l, k});
      advance(1);
    } else if (c == '-') {
      out.push_back(Token{Tok::Minus, "-", l, k});
      advance(1);
    } else if (c == '/') {
      out.push_back(Token{Tok::Slash, "/", l, k});
      advance(1);
    } else {
      throw ParseError(l, k, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

class QlpParser {
 public:
  explicit QlpParser(std::string_view text) : toks_(tokenize(text)) {}

  QipInstance parse() {
    if (is_word("NAME")) {
      ++pos_;
      name_ = expect_ident("instance name").text;
    }
    if (is_word("MINIMIZE")) {
      maximize_ = false;
    } else if (is_word("MAXIMIZE")) {
      maximize_ = true;
    } else {
      fail("expected MINIMIZE or MAXIMIZE");
    }
    ++pos_;
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) pos_ += 2;
    objective_ = expression();

    if (is_word("SUBJECT")) {
      expect_words({"SUBJECT", "TO"});
      while (!at_section()) rows_.push_back(row(RowSide::Existential));
    }
    if (is_word("UNCERTAINTY")) {
      expect_words({"UNCERTAINTY", "SUBJECT", "TO"});
      while (!at_section()) urows_.push_back(row(RowSide::Universal));
    }
    if (is_word("BOUNDS")) {
      ++pos_;
      while (!at_section()) bound();
    }
    while (is_word("GENERALS") || is_word("BINARIES") || is_word("CONTINUOUS")) {
      const std::string section = peek().text;
      ++pos_;
      while (!at_section()) {
        const Token& t = expect_ident("variable");
        const int v = var(t.text);
        kind_[v] = section == "CONTINUOUS" ? VarKind::TrailingContinuous : VarKind::Integer;
        if (section == "BINARIES") {
          if (!has_lower_[v]) lower_[v] = 0;
          if (!has_upper_[v]) upper_[v] = 1;
          has_lower_[v] = has_upper_[v] = true;
        }
      }
    }
    if (!is_word("ORDER")) fail("expected ORDER");
    ++pos_;
    while (!is_word("END")) {
      const Token& t = peek();
      if (t.kind == Tok::Slash) {
        ++pos_;
        continue;
      }
      if (t.kind == Tok::Ident && (t.text == "E" || t.text == "A")) {
        blocks_.push_back(QuantBlock{t.text == "E" ? Quantifier::Exists : Quantifier::ForAll, {}});
        ++pos_;
        continue;
      }
      if (t.kind != Tok::Ident || is_keyword(t.text)) fail("expected E, A, / or a variable in ORDER");
      if (blocks_.empty()) fail("variable listed before the first E or A");
      blocks_.back().vars.push_back(var(t.text));
      ++pos_;
    }
    ++pos_;
    if (peek().kind != Tok::End) fail("text after END");
    return assemble();
  }

 private:
  struct Expr {
    std::vector<Term> terms;
    Rational constant;
  };
  struct RawRow {
    Expr lhs;
    Sense sense;
    bool ge;
    Rational rhs;
    RowSide side;
  };

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().column, msg); }

  static bool is_keyword(const std::string& s) {
    static const char* const words[] = {"NAME",    "MINIMIZE", "MAXIMIZE",   "SUBJECT", "TO",  "UNCERTAINTY",
                                        "BOUNDS",  "GENERALS", "BINARIES",   "CONTINUOUS", "ORDER", "END"};
    for (const char* w : words)
      if (s == w) return true;
    return false;
  }
  bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool at_section() const {
    if (peek().kind == Tok::End) fail("unexpected end of input");
    return peek().kind == Tok::Ident && is_keyword(peek().text) && peek(1).kind != Tok::Colon;
  }
  void expect_words(std::initializer_list<const char*> words) {
    for (const char* w : words) {
      if (!is_word(w)) fail(std::string("expected ") + w);
      ++pos_;
    }
  }
  const Token& expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) fail(std::string("expected ") + what);
    ++pos_;
    return t;
  }

  Rational number_token() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail("expected a number");
    ++pos_;
    try {
      return Rational::parse(t.text);
    } catch (const std::exception& e) {
      throw ParseError(t.line, t.column, e.what());
    }
  }

  Rational signed_number() {
    bool neg = false;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      if (peek().kind == Tok::Minus) neg = !neg;
      ++pos_;
    }
    const Rational r = number_token();
    return neg ? -r : r;
  }

  int var(const std::string& name) {
    if (name == "E" || name == "A") fail("'" + name + "' is reserved");
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int v = static_cast<int>(names_.size());
    index_.emplace(name, v);
    names_.push_back(name);
    lower_.push_back(0);
    upper_.push_back(0);
    has_lower_.push_back(false);
    has_upper_.push_back(false);
    kind_.push_back(VarKind::Integer);
    return v;
  }

  // [sign] term { sign term }, term = number | [number] ident
  Expr expression() {
    Expr e;
    bool first = true;
    while (true) {
      bool neg = false;
      bool had_sign = false;
      while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        if (peek().kind == Tok::Minus) neg = !neg;
        had_sign = true;
        ++pos_;
      }
      if (!first && !had_sign) break;
      const Token& t = peek();
      if (t.kind == Tok::Number) {
        Rational c = number_token();
        if (neg) c = -c;
        if (peek().kind == Tok::Ident && !is_keyword(peek().text) && peek(1).kind != Tok::Colon) {
          e.terms.push_back(Term{var(peek().text), c});
          ++pos_;
        } else {
          e.constant += c;
        }
      } else if (t.kind == Tok::Ident && !is_keyword(t.text)) {
        e.terms.push_back(Term{var(t.text), neg ? Rational(-1) : Rational(1)});
        ++pos_;
      } else {
        fail("expected a term");
      }
      first = false;
    }
    return e;
  }

  RawRow row(RowSide side) {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) pos_ += 2;
    RawRow r;
    r.side = side;
    r.lhs = expression();
    r.ge = false;
    switch (peek().kind) {
      case Tok::Le: r.sense = Sense::LE; break;
      case Tok::Ge:
        r.sense = Sense::LE;
        r.ge = true;
        break;
      case Tok::Eq: r.sense = Sense::EQ; break;
      default: fail("expected <=, >= or =");
    }
    ++pos_;
    r.rhs = signed_number();
    return r;
  }

  void bound() {
    // lo <= v [<= hi] | v <= hi | v >= lo | v = value
    auto to_int = [&](const Rational& r, const Token& at) {
      if (!r.is_integer()) throw ParseError(at.line, at.column, "bounds must be integers");
      return r.num();
    };
    const Token start = peek();
    if (start.kind == Tok::Ident && !is_keyword(start.text)) {
      const int v = var(start.text);
      bound_order_.push_back(v);
      ++pos_;
      const Tok op = peek().kind;
      if (op != Tok::Le && op != Tok::Ge && op != Tok::Eq) fail("expected a bound relation");
      ++pos_;
      const Token at = peek();
      const Int val = to_int(signed_number(), at);
      if (op != Tok::Ge) {
        upper_[v] = val;
        has_upper_[v] = true;
      }
      if (op != Tok::Le) {
        lower_[v] = val;
        has_lower_[v] = true;
      }
      return;
    }
    const Token at = peek();
    const Int lo = to_int(signed_number(), at);
    if (peek().kind != Tok::Le) fail("expected <=");
    ++pos_;
    const int v = var(expect_ident("variable").text);
    bound_order_.push_back(v);
    lower_[v] = lo;
    has_lower_[v] = true;
    if (peek().kind == Tok::Le) {
      ++pos_;
      const Token at2 = peek();
      upper_[v] = to_int(signed_number(), at2);
      has_upper_[v] = true;
    }
  }

  // Variables are numbered by first appearance in BOUNDS, then by first
  // appearance anywhere else.
  std::vector<int> numbering() const {
    const std::size_t n = names_.size();
    std::vector<int> perm(n, -1);
    int next = 0;
    for (int v : bound_order_)
      if (perm[v] < 0) perm[v] = next++;
    for (std::size_t v = 0; v < n; ++v)
      if (perm[v] < 0) perm[v] = next++;
    return perm;
  }

  QipInstance assemble() {
    const std::vector<int> perm = numbering();
    const std::size_t n = names_.size();
    auto remap = [&](std::vector<Term> terms) {
      for (Term& t : terms) t.var = perm[t.var];
      return terms;
    };
    QipInstance q;
    q.name = name_;
    q.maximize = maximize_;
    q.var_names.resize(n);
    q.domains.resize(n);
    std::vector<std::string> unbounded;
    for (std::size_t v = 0; v < n; ++v) {
      q.var_names[perm[v]] = names_[v];
      q.domains[perm[v]] = VarDomain{lower_[v], upper_[v], kind_[v]};
      if (!has_upper_[v]) unbounded.push_back(names_[v]);
    }
    q.blocks = blocks_;
    for (auto& b : q.blocks)
      for (int& v : b.vars) v = perm[v];
    q.objective = normalize_terms(remap(objective_.terms));
    q.objective_constant = objective_.constant;
    if (maximize_) {
      for (Term& t : q.objective) t.coef = -t.coef;
      q.objective_constant = -q.objective_constant;
    }
    auto build = [&](const RawRow& r) {
      const Rational rhs = r.rhs - r.lhs.constant;
      return r.ge ? LinConstraint::at_least(remap(r.lhs.terms), rhs, r.side)
                  : LinConstraint::make(remap(r.lhs.terms), r.sense, rhs, r.side);
    };
    for (const auto& r : rows_) q.existential_rows.push_back(build(r));
    for (const auto& r : urows_) q.universal_rows.push_back(build(r));
    ValidationReport rep = validate(q);
    if (!rep.ok()) throw SemanticError(std::move(rep));
    if (!unbounded.empty()) throw SemanticError("variable " + unbounded.front() + " has no upper bound");
    return q;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string name_;
  bool maximize_ = false;
  Expr objective_;
  std::vector<RawRow> rows_;
  std::vector<RawRow> urows_;
  std::vector<QuantBlock> blocks_;
  std::map<std::string, int> index_;
  std::vector<std::string> names_;
  std::vector<Int> lower_;
  std::vector<Int> upper_;
  std::vector<bool> has_lower_;
  std::vector<bool> has_upper_;
  std::vector<VarKind> kind_;
  std::vector<int> bound_order_;
};

inline void write_terms(std::ostream& os, const std::vector<Term>& terms, const std::vector<std::string>& names,
                        const Rational& constant, bool negate) {
  bool first = true;
  auto emit = [&](Rational c, const std::string* name) {
    if (negate) c = -c;
    const bool neg = c.sign() < 0;
    const Rational mag = neg ? -c : c;
    if (first) {
      if (neg) os << "- ";
    } else {
      os << (neg ? " - " : " + ");
    }
    if (name == nullptr) {
      os << mag.str();
    } else {
      if (mag != Rational(1)) os << mag.str() << ' ';
      os << *name;
    }
    first = false;
  };
  for (const Term& t : terms) emit(t.coef, &names[t.var]);
  if (!constant.is_zero()) emit(constant, nullptr);
  if (first) os << '0';
}

}  // namespace detail

/// Parses a .qlp document. Throws ParseError on malformed text and
/// SemanticError when the instance fails validation.
inline QipInstance parse_qlp(std::string_view text) { return detail::QlpParser(text).parse(); }

/// Canonical text of an instance. Bounds list every variable in index order,
/// which fixes the variable numbering on the way back in.
inline std::string write_qlp(const QipInstance& q) {
  std::ostringstream os;
  if (!q.name.empty()) os << "NAME " << q.name << '\n';
  os << (q.maximize ? "MAXIMIZE" : "MINIMIZE") << "\n obj: ";
  detail::write_terms(os, q.objective, q.var_names, q.objective_constant, q.maximize);
  os << "\nSUBJECT TO\n";
  auto write_rows = [&](const std::vector<LinConstraint>& rows, const char* prefix) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      os << ' ' << prefix << (r + 1) << ": ";
      detail::write_terms(os, rows[r].terms, q.var_names, Rational(0), false);
      os << (rows[r].sense == Sense::EQ ? " = " : " <= ") << rows[r].rhs.str() << '\n';
    }
  };
  write_rows(q.existential_rows, "c");
  if (!q.universal_rows.empty()) {
    os << "UNCERTAINTY SUBJECT TO\n";
    write_rows(q.universal_rows, "u");
  }
  os << "BOUNDS\n";
  for (int v = 0; v < q.num_vars(); ++v)
    os << ' ' << q.domains[v].lower << " <= " << q.var_names[v] << " <= " << q.domains[v].upper << '\n';
  auto write_kind = [&](VarKind kind, const char* title) {
    std::vector<int> vars;
    for (int v = 0; v < q.num_vars(); ++v)
      if (q.domains[v].kind == kind) vars.push_back(v);
    if (vars.empty()) return;
    os << title << '\n';
    for (int v : vars) os << ' ' << q.var_names[v] << '\n';
  };
  write_kind(VarKind::Integer, "GENERALS");
  write_kind(VarKind::TrailingContinuous, "CONTINUOUS");
  os << "ORDER\n";
  for (const auto& block : q.blocks) {
    os << ' ' << (block.quantifier == Quantifier::Exists ? 'E' : 'A');
    for (int v : block.vars) os << ' ' << q.var_names[v];
    os << '\n';
  }
  os << "END\n";
  return os.str();
}

inline std::string write_qlp(const MipInstance& m) { return write_qlp(m.model); }

inline QipInstance read_qlp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_qlp(ss.str());
}

inline void write_qlp_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace qrobust
