#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chartkit/answers.hpp"

using namespace chartkit;
using namespace chartkit::answers;

TEST_CASE("numeric margin accepts 4% and rejects 6%") {
  CHECK(gpt_acc_local("104", "100").correct);
  CHECK_FALSE(gpt_acc_local("106", "100").correct);
  CHECK(gpt_acc_local("104", "100").method == Verdict::Method::numeric_margin);
}

TEST_CASE("string normalization path") {
  Verdict v = gpt_acc_local("increasing", "Increasing.");
  CHECK(v.correct);
  CHECK(v.method == Verdict::Method::string_exact);
  CHECK(gpt_acc_local("the  answer", "the answer").correct);
  CHECK_FALSE(gpt_acc_local("rising", "falling").correct);
}

TEST_CASE("formatted numerals compare numerically") {
  CHECK(gpt_acc_local("25.0%", "25%").correct);
  CHECK(gpt_acc_local("1,200", "1200").correct);
  CHECK(gpt_acc_local("$99", "99").correct);
}

TEST_CASE("relaxed accuracy equals the QA rule") {
  CHECK(relaxed_acc("3.14", "3.2"));  // 0.06/3.2 = 1.875% <= 5%
  CHECK(relaxed_acc("yes", "Yes"));
  CHECK_FALSE(relaxed_acc("12", "0"));  // zero ground truth demands exact
  CHECK(relaxed_acc("0", "0"));

  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    std::string pred = std::to_string(static_cast<int>(rng() % 100));
    std::string gt = std::to_string(static_cast<int>(rng() % 100));
    CHECK(relaxed_acc(pred, gt) == gpt_acc_local(pred, gt).correct);
  }
  CHECK(relaxed_acc("hello", "hello") == gpt_acc_local("hello", "hello").correct);
}

TEST_CASE("margin boundary is inclusive with a tiny epsilon guard") {
  std::mt19937_64 rng(2025);
  for (int i = 0; i < 100; ++i) {
    double g = 1.0 + static_cast<double>(rng() % 100000) / 97.0;
    if (rng() % 2) g = -g;
    char gt[64], at_bound[64], beyond[64];
    std::snprintf(gt, sizeof(gt), "%.9f", g);
    std::snprintf(at_bound, sizeof(at_bound), "%.9f", 1.05 * g);
    std::snprintf(beyond, sizeof(beyond), "%.9f", 1.0500001 * g);
    CAPTURE(gt);
    CHECK(relaxed_acc(at_bound, gt));
    CHECK_FALSE(relaxed_acc(beyond, gt));
  }
}

TEST_CASE("symmetric formatting: equal after normalization is correct") {
  CHECK(gpt_acc_local("  Steady   Growth ", "steady growth.").correct);
}

TEST_CASE("chart type exact match goes through the synonym table") {
  CHECK(exact_match("Pie Chart", "pie", MatchField::chart_type));
  CHECK(exact_match("3D bar chart", "bar3d", MatchField::chart_type));
  CHECK(exact_match("bar3d", "bar3d", MatchField::chart_type));
  CHECK(exact_match("doughnut chart", "ring", MatchField::chart_type));
  CHECK_FALSE(exact_match("line chart", "bar", MatchField::chart_type));
  CHECK_FALSE(exact_match("some new chart", "bar", MatchField::chart_type));
  CHECK_FALSE(exact_match("pie", "not_a_type", MatchField::chart_type));
}

TEST_CASE("title exact match uses answer normalization") {
  CHECK(exact_match("Annual Sales", "annual sales", MatchField::title));
  CHECK(exact_match("Annual Sales.", "Annual  Sales", MatchField::title));
  CHECK_FALSE(exact_match("Annual Sale", "Annual Sales", MatchField::title));
}

TEST_CASE("custom synonym tables extend the defaults") {
  SynonymTable t;
  t.add("weird bars", ChartTypeId::bar);
  CHECK(exact_match("Weird  Bars", "bar", MatchField::chart_type, t));
  CHECK_FALSE(exact_match("pie chart", "pie", MatchField::chart_type, t));
}
