#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chartkit/edit_distance.hpp"
#include "support/test_support.hpp"

using namespace chartkit;

TEST_CASE("known distances") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("Revene", "Revenue") == 1);
  CHECK(levenshtein("flaw", "lawn") == 2);
  CHECK(levenshtein("a", "b") == 1);
}

TEST_CASE("case sensitivity is the caller's business") {
  CHECK(levenshtein("Sales", "sales") == 1);
}

TEST_CASE("full distance agrees with the DP oracle on random strings") {
  std::mt19937_64 rng(99);
  auto random_string = [&](std::size_t max_len) {
    std::size_t n = rng() % (max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
      s.push_back(static_cast<char>('a' + rng() % 4));
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    std::string a = random_string(12), b = random_string(12);
    CHECK(levenshtein(a, b) == testsupport::levenshtein_oracle(a, b));
  }
}

TEST_CASE("banded threshold check agrees with the oracle") {
  std::mt19937_64 rng(7);
  auto random_string = [&](std::size_t max_len) {
    std::size_t n = rng() % (max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
      s.push_back(static_cast<char>('a' + rng() % 3));
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    std::string a = random_string(10), b = random_string(10);
    for (std::size_t limit : {0u, 1u, 2u, 5u, 9u}) {
      bool expected = testsupport::levenshtein_oracle(a, b) <= limit;
      CHECK(levenshtein_within(a, b, limit) == expected);
    }
  }
}

TEST_CASE("banded check edge cases") {
  CHECK(levenshtein_within("", "", 0));
  CHECK(levenshtein_within("ab", "", 2));
  CHECK_FALSE(levenshtein_within("abc", "", 2));
  CHECK(levenshtein_within("abcdef", "abcdef", 0));
  CHECK_FALSE(levenshtein_within("abcdef", "abcdeg", 0));
}
