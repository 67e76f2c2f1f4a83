#include "cif/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <stdexcept>

namespace cif {

namespace {

using Fn = std::function<double(double)>;

const std::map<std::string, double (*)(double)>& function_table() {
  static const std::map<std::string, double (*)(double)> table = {
      {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},  {"asin", std::asin},
      {"acos", std::acos}, {"atan", std::atan}, {"sinh", std::sinh}, {"cosh", std::cosh},
      {"tanh", std::tanh}, {"exp", std::exp},   {"log", std::log},  {"sqrt", std::sqrt},
      {"abs", std::fabs}};
  return table;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Fn parse() {
    Fn e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) + ": " +
                                what + " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary() {
    const char c = peek();
    return c == '(' || std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
           std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  Fn expression() {
    Fn lhs = term();
    while (true) {
      const char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        Fn rhs = term();
        if (c == '+')
          lhs = [lhs, rhs](double x) { return lhs(x) + rhs(x); };
        else
          lhs = [lhs, rhs](double x) { return lhs(x) - rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn term() {
    Fn lhs = factor();
    while (true) {
      const char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        Fn rhs = factor();
        if (c == '*')
          lhs = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
        else
          lhs = [lhs, rhs](double x) { return lhs(x) / rhs(x); };
      } else if (starts_primary()) {
        // Juxtaposition: "2x", "3 pi x", "x(1-x)".
        Fn rhs = factor();
        lhs = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn factor() {
    const char c = peek();
    if (c == '+') {
      ++pos_;
      return factor();
    }
    if (c == '-') {
      ++pos_;
      Fn f = factor();
      return [f](double x) { return -f(x); };
    }
    return power();
  }

  Fn power() {
    Fn base = primary();
    if (peek() == '^') {
      ++pos_;
      Fn exponent = factor();  // right-associative: a^b^c = a^(b^c)
      return [base, exponent](double x) { return std::pow(base(x), exponent(x)); };
    }
    return base;
  }

  Fn primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Fn inner = expression();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("expected a number, name, or '('");
  }

  Fn number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return [value](double) { return value; };
  }

  Fn identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return [](double x) { return x; };
    if (name == "pi") return [](double) { return std::numbers::pi; };
    auto it = function_table().find(name);
    if (it == function_table().end()) {
      pos_ = start;
      fail("unknown name \"" + name + "\"");
    }
    if (peek() != '(') fail("expected '(' after function \"" + name + "\"");
    ++pos_;
    Fn arg = expression();
    if (peek() != ')') fail("expected ')'");
    ++pos_;
    double (*fn)(double) = it->second;
    return [fn, arg](double x) { return fn(arg(x)); };
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::function<double(double)> parse_expression(const std::string& text) {
  Parser p(text);
  return p.parse();
}

}  // namespace cif
