#pragma once

#include <functional>
#include <string>

namespace cif {

/// Parses an elementary expression in one variable x and returns it as a
/// callable. Supported: decimal/scientific literals, `x`, `pi`, the operators
/// + - * / ^ (right-associative power), parentheses, implicit multiplication
/// by juxtaposition ("x(1-x)", "2x", "3 pi x"), and the functions
/// sin cos tan asin acos atan sinh cosh tanh exp log sqrt abs.
/// Throws std::invalid_argument with the offending position on bad input.
std::function<double(double)> parse_expression(const std::string& text);

}  // namespace cif
