#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chartkit/numbers.hpp"

using namespace chartkit;

TEST_CASE("plain integers and decimals") {
  CHECK(parse_number("10") == 10.0);
  CHECK(parse_number("-5") == -5.0);
  CHECK(parse_number("+3.5") == 3.5);
  CHECK(parse_number("0") == 0.0);
  CHECK(parse_number(".5") == 0.5);
  CHECK(parse_number("5.") == 5.0);
  CHECK(parse_number("  42  ") == 42.0);
}

TEST_CASE("thousands separators must be well formed") {
  CHECK(parse_number("1,200") == 1200.0);
  CHECK(parse_number("12,345,678") == 12345678.0);
  CHECK(parse_number("1,200.50") == 1200.5);
  CHECK_FALSE(parse_number("1,20").has_value());
  CHECK_FALSE(parse_number("1,2345").has_value());
  CHECK_FALSE(parse_number("1234,567").has_value());
  CHECK_FALSE(parse_number(",200").has_value());
}

TEST_CASE("percent keeps face magnitude") {
  CHECK(parse_number("25%") == 25.0);
  CHECK(parse_number("25.0%") == 25.0);
  CHECK(parse_number("-3.5 %") == -3.5);
}

TEST_CASE("scientific notation") {
  CHECK(parse_number("1.2e3") == 1200.0);
  CHECK(parse_number("1E-2") == 0.01);
  CHECK(parse_number("-2.5e+2") == -250.0);
}

TEST_CASE("currency prefixes and unit suffixes strip") {
  CHECK(parse_number("$1,200.50") == 1200.5);
  CHECK(parse_number("€99") == 99.0);
  CHECK(parse_number("US$12") == 12.0);
  CHECK(parse_number("10 kg") == 10.0);
  CHECK(parse_number("10kg") == 10.0);
  CHECK(parse_number("120 USD") == 120.0);
  CHECK(parse_number("$ 15") == 15.0);
}

TEST_CASE("non-numbers stay text") {
  CHECK_FALSE(parse_number("").has_value());
  CHECK_FALSE(parse_number("   ").has_value());
  CHECK_FALSE(parse_number("abc").has_value());
  CHECK_FALSE(parse_number("five").has_value());
  CHECK_FALSE(parse_number("10 20 30").has_value());
  CHECK_FALSE(parse_number("1.2.3").has_value());
  CHECK_FALSE(parse_number("Q1 2020").has_value());
  CHECK_FALSE(parse_number("10 kilometres traveled").has_value());
  CHECK_FALSE(parse_number("--5").has_value());
  CHECK_FALSE(parse_number("$").has_value());
}

TEST_CASE("bare exponent letter is a unit, not an exponent") {
  CHECK(parse_number("10e") == 10.0);
  CHECK(parse_number("3e9") == 3e9);
}

TEST_CASE("answer normalization") {
  CHECK(normalize_answer("  Increasing.  ") == "increasing");
  CHECK(normalize_answer("A  B\tC") == "a b c");
  CHECK(normalize_answer("YES") == "yes");
  CHECK(normalize_answer("") == "");
  CHECK(normalize_answer("x..") == "x.");
}
