#include <cmath>
#include <stdexcept>
#include <string>

#include "cif/expr.hpp"
#include "doctest.h"

using cif::parse_expression;

namespace {
constexpr double kPi = 3.14159265358979323846;

double at(const std::string& text, double x) { return parse_expression(text)(x); }
}  // namespace

TEST_SUITE_BEGIN("expr");

TEST_CASE("literals") {
  CHECK(at("3.5", 0.0) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(at("1e-3", 0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(at("2.5E2", 0.0) == doctest::Approx(250.0).epsilon(1e-15));
  CHECK(at(".25", 0.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("variable and constants") {
  CHECK(at("x", 0.7) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(at("pi", 0.0) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("operator precedence and associativity") {
  CHECK(at("2+3*4", 0.0) == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(at("2*3^2", 0.0) == doctest::Approx(18.0).epsilon(1e-15));
  CHECK(at("-x^2", 3.0) == doctest::Approx(-9.0).epsilon(1e-15));  // unary minus binds last
  CHECK(at("(2+3)*4", 0.0) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(at("2^3^2", 0.0) == doctest::Approx(512.0).epsilon(1e-15));  // right-associative
  CHECK(at("8/4/2", 0.0) == doctest::Approx(1.0).epsilon(1e-15));    // left-associative
  CHECK(at("1-2-3", 0.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(at("+x", 2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("implicit multiplication by juxtaposition") {
  CHECK(at("x(1-x)", 0.25) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(at("2x", 3.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(at("3 pi x", 0.5) == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  CHECK(at("(1+x)(1-x)", 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(at("2sin(pi/2)", 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("the full function table") {
  const double x = 0.37;
  CHECK(at("sin(x)", x) == doctest::Approx(std::sin(x)).epsilon(1e-15));
  CHECK(at("cos(x)", x) == doctest::Approx(std::cos(x)).epsilon(1e-15));
  CHECK(at("tan(x)", x) == doctest::Approx(std::tan(x)).epsilon(1e-15));
  CHECK(at("asin(x)", x) == doctest::Approx(std::asin(x)).epsilon(1e-15));
  CHECK(at("acos(x)", x) == doctest::Approx(std::acos(x)).epsilon(1e-15));
  CHECK(at("atan(x)", x) == doctest::Approx(std::atan(x)).epsilon(1e-15));
  CHECK(at("sinh(x)", x) == doctest::Approx(std::sinh(x)).epsilon(1e-15));
  CHECK(at("cosh(x)", x) == doctest::Approx(std::cosh(x)).epsilon(1e-15));
  CHECK(at("tanh(x)", x) == doctest::Approx(std::tanh(x)).epsilon(1e-15));
  CHECK(at("exp(x)", x) == doctest::Approx(std::exp(x)).epsilon(1e-15));
  CHECK(at("log(x)", x) == doctest::Approx(std::log(x)).epsilon(1e-15));
  CHECK(at("sqrt(x)", x) == doctest::Approx(std::sqrt(x)).epsilon(1e-15));
  CHECK(at("abs(x)", -0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("division and compound expressions") {
  CHECK(at("1/x", 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(at("sin(pi x / 2)", 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at("exp(-10(x-0.5)^2)", 0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("the stock initial-data strings evaluate correctly") {
  CHECK(at("x(1-x)", 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(at("sin(pi x/2)", 0.5) ==
        doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  CHECK(at("1e-3 sin(pi x/2)", 1.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(at("cos(3 pi x)", 1.0 / 3.0) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(at("cos(3 pi x)", 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("whitespace is insignificant") {
  CHECK(at("  x ( 1 - x )  ", 0.25) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(at("2 + 3\t*4", 0.0) == doctest::Approx(14.0).epsilon(1e-15));
}

TEST_CASE("malformed input throws with a position") {
  for (const char* bad : {"", "x +", "(x", "foo(x)", "sin x", "x )", "2 ** 3",
                          "sin()", "x ^", "@", "pi("}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_expression(bad), std::invalid_argument);
  }
  try {
    parse_expression("x + * 2");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("position") != std::string::npos);
    CHECK(what.find("x + * 2") != std::string::npos);
  }
}

TEST_SUITE_END();
