#ifndef LRP_PARSER_HPP
#define LRP_PARSER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lrp/ast.hpp"

namespace lrp {

struct Token {
  enum class Kind { Keyword, Ident, Int, Punct, End };
  Kind kind;
  std::string text;
  int line = 1;  // 1-based
  int col = 1;   // 1-based
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

namespace detail {

inline bool is_keyword(std::string_view s) {
  static const char* kws[] = {"func", "with", "in",      "let",  "if-has",
                              "bind-as", "else", "extract", "set",  "get",
                              "erase", "int",  "unit"};
  for (auto* k : kws)
    if (s == k) return true;
  return false;
}

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

}  // namespace detail

/// Whitespace-insensitive token stream; `--` starts a line comment.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (c >= '0' && c <= '9') {
      std::size_t j = i;
      while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
      std::string text(src.substr(i, j - i));
      advance(j - i);
      out.push_back({Token::Kind::Int, std::move(text), tl, tc});
      continue;
    }
    if (detail::ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && detail::ident_char(src[j])) ++j;
      std::string text(src.substr(i, j - i));
      // hyphenated keywords
      if ((text == "if" && src.substr(j, 4) == "-has") ||
          (text == "bind" && src.substr(j, 3) == "-as")) {
        std::size_t ext = text == "if" ? 4 : 3;
        if (j + ext >= src.size() || !detail::ident_char(src[j + ext])) {
          text += std::string(src.substr(j, ext));
          j += ext;
        }
      }
      advance(j - i);
      auto kind = detail::is_keyword(text) ? Token::Kind::Keyword
                                           : Token::Kind::Ident;
      out.push_back({kind, std::move(text), tl, tc});
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      advance(2);
      out.push_back({Token::Kind::Punct, "->", tl, tc});
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == '+' || c == '-' || c == ':' ||
        c == '=') {
      advance(1);
      out.push_back({Token::Kind::Punct, std::string(1, c), tl, tc});
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr program() {
    auto e = expr();
    if (!at_end())
      throw ParseError("unexpected trailing input '" + peek().text + "'",
                       peek().line, peek().col);
    return e;
  }

  ExprPtr expr() {
    const Token& t = peek();
    if (is_kw("func")) return func_form();
    if (is_kw("let")) return let_form();
    if (is_kw("if-has")) return if_has_form();
    (void)t;
    return arith();
  }

  TypePtr type() {
    TypePtr lhs = atom_type();
    if (is_punct("->")) {
      next();
      return Type::arrow(lhs, type());  // right-associative
    }
    return lhs;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_kw(std::string_view s) const {
    return peek().kind == Token::Kind::Keyword && peek().text == s;
  }
  bool is_punct(std::string_view s) const {
    return peek().kind == Token::Kind::Punct && peek().text == s;
  }
  const Token& expect_punct(std::string_view s) {
    if (!is_punct(s))
      throw ParseError("expected '" + std::string(s) + "', found '" +
                           peek().text + "'",
                       peek().line, peek().col);
    return next();
  }
  const Token& expect_kw(std::string_view s) {
    if (!is_kw(s))
      throw ParseError("expected '" + std::string(s) + "', found '" +
                           peek().text + "'",
                       peek().line, peek().col);
    return next();
  }
  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident)
      throw ParseError("expected identifier, found '" + peek().text + "'",
                       peek().line, peek().col);
    return next().text;
  }

  ExprPtr func_form() {
    const Token& kw = expect_kw("func");
    std::string fname = expect_ident();
    std::string param = expect_ident();
    expect_punct(":");
    TypePtr pt = type();
    expect_kw("with");
    ExprPtr body = expr();
    expect_kw("in");
    ExprPtr cont = expr();
    return func(std::move(fname), std::move(param), std::move(pt),
                std::move(body), std::move(cont), kw.line, kw.col);
  }

  ExprPtr let_form() {
    const Token& kw = expect_kw("let");
    std::string name = expect_ident();
    expect_punct("=");
    ExprPtr bound = expr();
    expect_kw("in");
    ExprPtr body = expr();
    return let(std::move(name), std::move(bound), std::move(body), kw.line,
               kw.col);
  }

  ExprPtr if_has_form() {
    const Token& kw = expect_kw("if-has");
    if (peek().kind != Token::Kind::Ident)
      throw ParseError(
          "if-has scrutinee must be an identifier, found '" + peek().text + "'",
          peek().line, peek().col);
    std::string scrut = next().text;
    std::string prop = expect_ident();
    expect_punct(":");
    TypePtr pt = type();
    expect_kw("bind-as");
    std::string bind = expect_ident();
    expect_kw("in");
    ExprPtr then_b = expr();
    expect_kw("else");
    ExprPtr else_b = expr();
    return if_has(std::move(scrut), std::move(prop), std::move(pt),
                  std::move(bind), std::move(then_b), std::move(else_b),
                  kw.line, kw.col);
  }

  // arith := app (("+"|"-") app)*   left-associative, equal precedence
  ExprPtr arith() {
    ExprPtr lhs = application();
    while (is_punct("+") || is_punct("-")) {
      const Token& op = next();
      ExprPtr rhs = application();
      lhs = op.text == "+" ? plus(lhs, rhs, op.line, op.col)
                           : minus(lhs, rhs, op.line, op.col);
    }
    return lhs;
  }

  bool starts_atom() const {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int:
      case Token::Kind::Ident:
        return true;
      case Token::Kind::Punct:
        return t.text == "(";
      case Token::Kind::Keyword:
        return t.text == "extract" || t.text == "set" || t.text == "get" ||
               t.text == "erase";
      default:
        return false;
    }
  }

  // app := atom atom*   left-associative
  ExprPtr application() {
    ExprPtr lhs = atom();
    while (starts_atom()) {
      const Token& t = peek();
      ExprPtr rhs = atom();
      lhs = app(lhs, rhs, t.line, t.col);
    }
    return lhs;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int: {
        next();
        std::int64_t v;
        try {
          v = std::stoll(t.text);
        } catch (const std::out_of_range&) {
          throw ParseError("integer literal out of range", t.line, t.col);
        }
        return int_lit(v, t.line, t.col);
      }
      case Token::Kind::Ident:
        next();
        return var(t.text, t.line, t.col);
      case Token::Kind::Punct:
        if (t.text == "(") {
          next();
          if (is_punct(")")) {  // unit literal
            next();
            return unit_lit(t.line, t.col);
          }
          ExprPtr e = expr();
          expect_punct(")");
          return e;
        }
        break;
      case Token::Kind::Keyword:
        if (t.text == "extract") {
          next();
          expect_punct("(");
          ExprPtr e = expr();
          expect_punct(")");
          return extract(std::move(e), t.line, t.col);
        }
        if (t.text == "set") {
          next();
          expect_punct("(");
          ExprPtr target = expr();
          expect_punct(",");
          std::string p = expect_ident();
          expect_punct(",");
          ExprPtr pe = expr();
          expect_punct(")");
          return set_prop(std::move(target), std::move(p), std::move(pe),
                          t.line, t.col);
        }
        if (t.text == "get" || t.text == "erase") {
          next();
          expect_punct("(");
          ExprPtr target = expr();
          expect_punct(",");
          std::string p = expect_ident();
          expect_punct(")");
          return t.text == "get"
                     ? get_prop(std::move(target), std::move(p), t.line, t.col)
                     : erase_prop(std::move(target), std::move(p), t.line,
                                  t.col);
        }
        break;
      default:
        break;
    }
    throw ParseError("expected expression, found '" +
                         (t.kind == Token::Kind::End ? "end of input" : t.text) +
                         "'",
                     t.line, t.col);
  }

  TypePtr atom_type() {
    const Token& t = peek();
    if (is_kw("int")) {
      next();
      return Type::make_int();
    }
    if (is_kw("unit")) {
      next();
      return Type::make_unit();
    }
    if (is_punct("(")) {
      next();
      TypePtr ty = type();
      expect_punct(")");
      return ty;
    }
    throw ParseError("expected type, found '" + t.text + "'", t.line, t.col);
  }
};

}  // namespace detail

/// Parses a whole program; the result contains surface nodes only.
inline ExprPtr parse_program(std::string_view source) {
  detail::Parser p(tokenize(source));
  return p.program();
}

}  // namespace lrp

#endif  // LRP_PARSER_HPP
