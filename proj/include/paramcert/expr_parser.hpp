#pragma once

#include <array>
#include <cctype>
#include <functional>
#include <string>
#include <string_view>

#include "paramcert/ratfun.hpp"

namespace paramcert {

namespace detail {

inline constexpr std::array<std::string_view, 16> kTranscendental = {
    "sin", "cos", "tan", "exp", "log", "ln", "sqrt", "abs", "asin", "acos", "atan", "sinh", "cosh", "tanh", "pow", "max"};

inline bool is_transcendental(std::string_view name) {
  for (auto f : kTranscendental)
    if (f == name) return true;
  return false;
}

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;  // 1-based
};

/// Recursive-descent parser for rational expressions:
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/')? unary)*      juxtaposition multiplies
///   unary := ('+'|'-') unary | power
///   power := atom ('^' ['-'] integer)?
///   atom  := number | identifier | '(' expr ')'
class ExprParser {
 public:
  using Resolver = std::function<std::optional<RatFun>(std::string_view)>;

  ExprParser(std::string_view text, RegistryPtr reg, Resolver resolve, std::size_t line, std::size_t column_offset)
      : text_(text), reg_(std::move(reg)), resolve_(std::move(resolve)), line_(line), col0_(column_offset) {
    tokenize();
  }

  RatFun parse() {
    RatFun r = expr();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'", peek().column);
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t column) const {
    throw ParseError(msg, line_, col0_ + column);
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(text_[i + 1])))) {
        while (i < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i])) || text_[i] == '.')) ++i;
        if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
          std::size_t j = i + 1;
          if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
          if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
            i = j;
            while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
          }
        }
        tokens_.push_back({Tok::number, std::string(text_.substr(start, i - start)), start + 1});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_')) ++i;
        tokens_.push_back({Tok::ident, std::string(text_.substr(start, i - start)), start + 1});
        continue;
      }
      Tok k;
      switch (c) {
        case '+': k = Tok::plus; break;
        case '-': k = Tok::minus; break;
        case '*': k = Tok::star; break;
        case '/': k = Tok::slash; break;
        case '^': k = Tok::caret; break;
        case '(': k = Tok::lparen; break;
        case ')': k = Tok::rparen; break;
        default: fail(std::string("unexpected character '") + c + "'", start + 1);
      }
      tokens_.push_back({k, std::string(1, c), start + 1});
      ++i;
    }
    tokens_.push_back({Tok::end, "end of expression", text_.size() + 1});
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  RatFun expr() {
    RatFun acc = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      bool minus = next().kind == Tok::minus;
      RatFun rhs = term();
      acc = minus ? acc - rhs : acc + rhs;
    }
    return acc;
  }

  RatFun term() {
    RatFun acc = unary();
    for (;;) {
      auto k = peek().kind;
      if (k == Tok::star) {
        next();
        acc = acc * unary();
      } else if (k == Tok::slash) {
        auto col = next().column;
        RatFun rhs = unary();
        if (rhs.is_zero()) fail("division by zero", col);
        acc = acc / rhs;
      } else if (k == Tok::number || k == Tok::ident || k == Tok::lparen) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  RatFun unary() {
    if (peek().kind == Tok::minus) {
      next();
      return -unary();
    }
    if (peek().kind == Tok::plus) {
      next();
      return unary();
    }
    return power();
  }

  RatFun power() {
    RatFun base = atom();
    if (peek().kind != Tok::caret) return base;
    next();
    bool negative = false;
    bool paren = false;
    if (peek().kind == Tok::lparen) {
      next();
      paren = true;
    }
    if (peek().kind == Tok::minus) {
      next();
      negative = true;
    }
    const Token& t = next();
    if (t.kind != Tok::number || t.text.find_first_not_of("0123456789") != std::string::npos)
      fail("exponent must be an integer literal", t.column);
    if (t.text.size() > 4) fail("exponent too large", t.column);
    if (paren && next().kind != Tok::rparen) fail("expected ')' after exponent", tokens_[pos_ - 1].column);
    int e = std::stoi(t.text);
    return base.pow(negative ? -e : e);
  }

  RatFun atom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::number: {
        try {
          return RatFun(Poly::constant(reg_, parse_rational(t.text)));
        } catch (const std::invalid_argument&) {
          fail("malformed number '" + t.text + "'", t.column);
        }
      }
      case Tok::ident: {
        bool call = peek().kind == Tok::lparen && peek().column == t.column + t.text.size();
        if (call && is_transcendental(t.text))
          throw UnsupportedExpression("line " + std::to_string(line_) + ", column " + std::to_string(col0_ + t.column) +
                                      ": function '" + t.text + "' is not rational");
        if (auto r = resolve_(t.text)) return *r;
        throw SemanticError("line " + std::to_string(line_) + ", column " + std::to_string(col0_ + t.column) +
                            ": undeclared symbol '" + t.text + "'");
      }
      case Tok::lparen: {
        RatFun inner = expr();
        if (peek().kind != Tok::rparen) fail("expected ')'", peek().column);
        next();
        return inner;
      }
      default: fail("unexpected '" + t.text + "'", t.column);
    }
  }

  std::string_view text_;
  RegistryPtr reg_;
  Resolver resolve_;
  std::size_t line_;
  std::size_t col0_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` over `reg`; identifiers resolve to registry variables.
inline RatFun parse_ratfun(std::string_view text, const RegistryPtr& reg, std::size_t line = 1,
                           std::size_t column_offset = 0) {
  auto resolve = [&reg](std::string_view name) -> std::optional<RatFun> {
    if (auto i = reg->find(name)) return RatFun(Poly::variable(reg, *i));
    return std::nullopt;
  };
  return detail::ExprParser(text, reg, resolve, line, column_offset).parse();
}

/// Human-readable polynomial input; `^` for powers, `*` optional, decimals read exactly.
inline Poly parse_poly(std::string_view text, const RegistryPtr& reg) {
  RatFun r = parse_ratfun(text, reg);
  if (!r.is_polynomial()) throw StructuralError("expression '" + std::string(text) + "' is not a polynomial");
  return r.num();
}

}  // namespace paramcert
