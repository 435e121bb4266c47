/**
 * @file expr.hpp
 * @brief Small math expression language used by problem files.
 *
 * Grammar (lowest to highest precedence):
 *   expression := term (('+'|'-') term)*
 *   term       := unary (('*'|'/') unary)*
 *   unary      := '-' unary | power
 *   power      := primary ('^' unary)?            // right-associative
 *   primary    := NUMBER | 'x' | 'pi' | 'e' | fn '(' expression ')'
 *              | '(' expression ')' | piecewise
 *   piecewise  := 'piecewise' '(' (cond '->' expression ',')+ 'else' '->' expression ')'
 *   cond       := expression ('<'|'<='|'>'|'>=') expression
 *
 * Functions: sin, cos, exp, abs, sqrt, log. Angles in radians.
 */
#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lipgo/problem.hpp"

namespace lipgo {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class CmpOp { Lt, Le, Gt, Ge };
enum class Func { Sin, Cos, Exp, Abs, Sqrt, Log };

struct Expr {
  struct Number {
    double value;
  };
  struct Var {};  // the single variable x
  struct Constant {
    double value;
    const char* name;  // "pi" or "e"
  };
  struct Binary {
    BinOp op;
    ExprPtr lhs, rhs;
  };
  struct Negate {
    ExprPtr operand;
  };
  struct Call {
    Func fn;
    ExprPtr arg;
  };
  struct Branch {
    ExprPtr lhs;
    CmpOp op;
    ExprPtr rhs;
    ExprPtr value;
  };
  struct Piecewise {
    std::vector<Branch> branches;  // evaluated left to right, first match wins
    ExprPtr otherwise;             // mandatory else branch
  };

  std::variant<Number, Var, Constant, Binary, Negate, Call, Piecewise> node;
};

namespace detail {
template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;
}  // namespace detail

inline double evaluate(const Expr& e, double x) {
  return std::visit(
      detail::Overload{
          [](const Expr::Number& n) { return n.value; },
          [&](const Expr::Var&) { return x; },
          [](const Expr::Constant& c) { return c.value; },
          [&](const Expr::Binary& b) {
            double l = evaluate(*b.lhs, x);
            double r = evaluate(*b.rhs, x);
            switch (b.op) {
              case BinOp::Add: return l + r;
              case BinOp::Sub: return l - r;
              case BinOp::Mul: return l * r;
              case BinOp::Div: return l / r;
              case BinOp::Pow: return std::pow(l, r);
            }
            return 0.0;  // unreachable
          },
          [&](const Expr::Negate& n) { return -evaluate(*n.operand, x); },
          [&](const Expr::Call& c) {
            double a = evaluate(*c.arg, x);
            switch (c.fn) {
              case Func::Sin: return std::sin(a);
              case Func::Cos: return std::cos(a);
              case Func::Exp: return std::exp(a);
              case Func::Abs: return std::fabs(a);
              case Func::Sqrt:
                if (a < 0.0) throw NumericError("sqrt of negative value", x);
                return std::sqrt(a);
              case Func::Log:
                if (a <= 0.0) throw NumericError("log of non-positive value", x);
                return std::log(a);
            }
            return 0.0;  // unreachable
          },
          [&](const Expr::Piecewise& p) {
            for (const auto& br : p.branches) {
              double l = evaluate(*br.lhs, x);
              double r = evaluate(*br.rhs, x);
              bool hit = false;
              switch (br.op) {
                case CmpOp::Lt: hit = l < r; break;
                case CmpOp::Le: hit = l <= r; break;
                case CmpOp::Gt: hit = l > r; break;
                case CmpOp::Ge: hit = l >= r; break;
              }
              if (hit) return evaluate(*br.value, x);
            }
            return evaluate(*p.otherwise, x);
          }},
      e.node);
}

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Abs: return "abs";
    case Func::Sqrt: return "sqrt";
    case Func::Log: return "log";
  }
  return "?";
}

inline const char* cmp_name(CmpOp c) {
  switch (c) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

/// Render a tree back to parseable text (fully parenthesized).
inline std::string to_string(const Expr& e) {
  return std::visit(
      detail::Overload{
          [](const Expr::Number& n) {
            std::ostringstream os;
            os.precision(17);
            os << n.value;
            return os.str();
          },
          [](const Expr::Var&) { return std::string("x"); },
          [](const Expr::Constant& c) { return std::string(c.name); },
          [](const Expr::Binary& b) {
            const char* op = b.op == BinOp::Add   ? " + "
                             : b.op == BinOp::Sub ? " - "
                             : b.op == BinOp::Mul ? "*"
                             : b.op == BinOp::Div ? "/"
                                                  : "^";
            return "(" + to_string(*b.lhs) + op + to_string(*b.rhs) + ")";
          },
          [](const Expr::Negate& n) { return "(-" + to_string(*n.operand) + ")"; },
          [](const Expr::Call& c) {
            return std::string(func_name(c.fn)) + "(" + to_string(*c.arg) + ")";
          },
          [](const Expr::Piecewise& p) {
            std::string s = "piecewise(";
            for (const auto& br : p.branches) {
              s += to_string(*br.lhs);
              s += " ";
              s += cmp_name(br.op);
              s += " ";
              s += to_string(*br.rhs);
              s += " -> ";
              s += to_string(*br.value);
              s += ", ";
            }
            s += "else -> " + to_string(*p.otherwise) + ")";
            return s;
          }},
      e.node);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    skip_ws();
    ExprPtr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string got = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw ParseError("expected " + expected + ", got " + got + " at line " +
                         std::to_string(line) + ", column " + std::to_string(col),
                     line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) == w) {
      std::size_t after = pos_ + w.size();
      // must not be a prefix of a longer identifier
      if (after >= text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[after])) ||
                                     text_[after] == '_')) {
        pos_ = after;
        return true;
      }
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr expression() {
    ExprPtr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = std::make_shared<Expr>(Expr{Expr::Binary{BinOp::Add, lhs, term()}});
      } else if (peek() == '-' && !is_arrow()) {
        ++pos_;
        lhs = std::make_shared<Expr>(Expr{Expr::Binary{BinOp::Sub, lhs, term()}});
      } else {
        return lhs;
      }
    }
  }

  // '->' must not be consumed as a minus inside piecewise branches
  bool is_arrow() {
    skip_ws();
    return pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>';
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = std::make_shared<Expr>(Expr{Expr::Binary{BinOp::Mul, lhs, unary()}});
      } else if (eat('/')) {
        lhs = std::make_shared<Expr>(Expr{Expr::Binary{BinOp::Div, lhs, unary()}});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (peek() == '-' && !is_arrow()) {
      ++pos_;
      return std::make_shared<Expr>(Expr{Expr::Negate{unary()}});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (eat('^')) {
      // exponent parses as unary so that 2^-3 works and 2^3^2 nests rightward
      return std::make_shared<Expr>(Expr{Expr::Binary{BinOp::Pow, base, unary()}});
    }
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("a number, 'x', a constant, a function call, or '('");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expression();
      if (!eat(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("a number, 'x', a constant, a function call, or '('");
  }

  ExprPtr number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return std::make_shared<Expr>(Expr{Expr::Number{value}});
  }

  ExprPtr identifier() {
    if (eat_word("piecewise")) return piecewise();
    if (eat_word("pi"))
      return std::make_shared<Expr>(Expr{Expr::Constant{3.14159265358979323846, "pi"}});
    if (eat_word("e"))
      return std::make_shared<Expr>(Expr{Expr::Constant{2.71828182845904523536, "e"}});
    if (eat_word("x")) return std::make_shared<Expr>(Expr{Expr::Var{}});
    static constexpr std::pair<const char*, Func> kFuncs[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos},   {"exp", Func::Exp},
        {"abs", Func::Abs}, {"sqrt", Func::Sqrt}, {"log", Func::Log}};
    for (auto [name, fn] : kFuncs) {
      if (eat_word(name)) {
        if (!eat('(')) fail("'(' after function name");
        ExprPtr arg = expression();
        if (!eat(')')) fail("')'");
        return std::make_shared<Expr>(Expr{Expr::Call{fn, arg}});
      }
    }
    // report the unknown identifier by name
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '_'))
      ++end;
    std::string word(text_.substr(pos_, end - pos_));
    fail("a known identifier (x, pi, e, sin, cos, exp, abs, sqrt, log, piecewise); '" + word +
         "' is not defined");
  }

  CmpOp comparison() {
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == '<') {
        ++pos_;
        if (eat('=')) return CmpOp::Le;
        return CmpOp::Lt;
      }
      if (text_[pos_] == '>') {
        ++pos_;
        if (eat('=')) return CmpOp::Ge;
        return CmpOp::Gt;
      }
    }
    fail("a comparison operator (<, <=, >, >=)");
  }

  ExprPtr piecewise() {
    if (!eat('(')) fail("'(' after piecewise");
    std::vector<Expr::Branch> branches;
    for (;;) {
      if (eat_word("else")) {
        if (!eat('-') || !eat('>')) fail("'->' after else");
        ExprPtr otherwise = expression();
        if (!eat(')')) fail("')'");
        if (branches.empty()) fail("at least one condition branch before else");
        return std::make_shared<Expr>(Expr{Expr::Piecewise{std::move(branches), otherwise}});
      }
      ExprPtr lhs = expression();
      CmpOp op = comparison();
      ExprPtr rhs = expression();
      if (!eat('-') || !eat('>')) fail("'->' after condition");
      ExprPtr value = expression();
      branches.push_back(Expr::Branch{lhs, op, rhs, value});
      if (!eat(',')) fail("',' before the next branch (an else branch is mandatory)");
    }
  }
};

}  // namespace detail

inline ExprPtr parse_expression(std::string_view text) {
  return detail::ExprParser(text).parse();
}

/// Wrap a parsed expression as a problem evaluator.
inline Evaluator make_evaluator(ExprPtr e) {
  return [e = std::move(e)](double x) { return evaluate(*e, x); };
}

}  // namespace lipgo
