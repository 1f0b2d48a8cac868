#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chartkit/scrm.hpp"
#include "support/test_support.hpp"

using namespace chartkit;
using namespace chartkit::scrm;

TEST_CASE("tolerance regime tables reproduce all 12 threshold pairs") {
  struct Row {
    Difficulty d;
    ToleranceLevel level;
    std::size_t j;
    double e;
  };
  const Row rows[] = {
      {Difficulty::normal, ToleranceLevel::strict, 0, 0.0},
      {Difficulty::normal, ToleranceLevel::slight, 2, 0.05},
      {Difficulty::normal, ToleranceLevel::high, 5, 0.1},
      {Difficulty::difficult, ToleranceLevel::strict, 0, 0.1},
      {Difficulty::difficult, ToleranceLevel::slight, 2, 0.3},
      {Difficulty::difficult, ToleranceLevel::high, 5, 0.5},
  };
  for (const Row& r : rows) {
    ToleranceRegime regime = regime_for(r.d, r.level);
    CHECK(regime.j_thr == r.j);
    CHECK(regime.e_thr == r.e);
  }
  // Spot checks through concrete chart types.
  CHECK(regime_for(ChartTypeId::bar, ToleranceLevel::slight).j_thr == 2);
  CHECK(regime_for(ChartTypeId::bar, ToleranceLevel::slight).e_thr == 0.05);
  CHECK(regime_for(ChartTypeId::radar, ToleranceLevel::strict).j_thr == 0);
  CHECK(regime_for(ChartTypeId::radar, ToleranceLevel::strict).e_thr == 0.1);
  CHECK(regime_for(ChartTypeId::heatmap, ToleranceLevel::strict).j_thr == 0);
  CHECK(regime_for(ChartTypeId::heatmap, ToleranceLevel::strict).e_thr == 0.0);
}

TEST_CASE("within a class thresholds are non-decreasing strict to high") {
  for (Difficulty d : {Difficulty::normal, Difficulty::difficult}) {
    auto s = regime_for(d, ToleranceLevel::strict);
    auto m = regime_for(d, ToleranceLevel::slight);
    auto h = regime_for(d, ToleranceLevel::high);
    CHECK(s.j_thr <= m.j_thr);
    CHECK(m.j_thr <= h.j_thr);
    CHECK(s.e_thr <= m.e_thr);
    CHECK(m.e_thr <= h.e_thr);
  }
}

namespace {

Triplet triplet(const std::string& row, const std::string& col,
                const std::string& value) {
  return {row, col, CellValue::classify(value)};
}

}  // namespace

TEST_CASE("triplet compatibility under edit and error thresholds") {
  auto strict = regime_for(Difficulty::normal, ToleranceLevel::strict);
  auto slight = regime_for(Difficulty::normal, ToleranceLevel::slight);

  // levenshtein("Revene","Revenue") = 1: rejected at strict, allowed at slight
  CHECK_FALSE(triplet_compatible(triplet("Revene", "Sales", "100"),
                                 triplet("Revenue", "Sales", "100"), strict));
  CHECK(triplet_compatible(triplet("Revene", "Sales", "100"),
                           triplet("Revenue", "Sales", "100"), slight));

  // 4% numeric error: inside slight (0.05), outside strict (0)
  CHECK(triplet_compatible(triplet("A", "Sales", "104"),
                           triplet("A", "Sales", "100"), slight));
  CHECK_FALSE(triplet_compatible(triplet("A", "Sales", "104"),
                                 triplet("A", "Sales", "100"), strict));

  // identical triplets pass the strictest regime
  CHECK(triplet_compatible(triplet("A", "Sales", "100"),
                           triplet("A", "Sales", "100"), strict));
}

TEST_CASE("zero ground truth requires exact equality") {
  auto high = regime_for(Difficulty::difficult, ToleranceLevel::high);
  CHECK(triplet_compatible(triplet("A", "c", "0"), triplet("A", "c", "0"), high));
  CHECK_FALSE(triplet_compatible(triplet("A", "c", "0.001"), triplet("A", "c", "0"), high));
}

TEST_CASE("mixed value kinds never match") {
  auto high = regime_for(Difficulty::normal, ToleranceLevel::high);
  CHECK_FALSE(triplet_compatible(triplet("A", "c", "ten"), triplet("A", "c", "10"), high));
  // both text within threshold
  CHECK(triplet_compatible(triplet("A", "c", "north"), triplet("A", "c", "norht"),
                           regime_for(Difficulty::normal, ToleranceLevel::slight)));
}

TEST_CASE("case-insensitive option folds before comparing") {
  ScrmConfig ci;
  ci.case_insensitive = true;
  auto strict = regime_for(Difficulty::normal, ToleranceLevel::strict);
  CHECK_FALSE(triplet_compatible(triplet("SALES", "c", "1"), triplet("sales", "c", "1"),
                                 strict));
  CHECK(triplet_compatible(triplet("SALES", "c", "1"), triplet("sales", "c", "1"),
                           strict, ci));
}

TEST_CASE("match_triplets identity and cardinality") {
  testsupport::TableGen gen(5);
  auto slight = regime_for(Difficulty::normal, ToleranceLevel::slight);
  for (int i = 0; i < 20; ++i) {
    ChartTable t = gen.table(5, 4);
    TripletSet s = to_triplets(t);
    MatchResult r = match_triplets(s, s, slight);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.pass);
  }

  ChartTable t = parse_csv("K,c1,c2\nr1,1,2\nr2,3,4");
  TripletSet full = to_triplets(t);
  TripletSet minus_one = full;
  minus_one.items.pop_back();
  MatchResult r = match_triplets(minus_one, full,
                                 regime_for(Difficulty::normal, ToleranceLevel::strict));
  CHECK(r.precision == 1.0);
  CHECK(r.recall == doctest::Approx(3.0 / 4.0));
  CHECK_FALSE(r.pass);
}

TEST_CASE("empty sets define 0/0 as 0 and never pass") {
  MatchResult r = match_triplets({}, {}, regime_for(Difficulty::normal,
                                                    ToleranceLevel::high));
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK_FALSE(r.pass);
}

TEST_CASE("matching cardinality equals brute force over all injections") {
  testsupport::TableGen gen(1234);
  for (int i = 0; i < 300; ++i) {
    TripletSet pred = gen.triplets(6);
    TripletSet gt = gen.triplets(6);
    for (Difficulty d : {Difficulty::normal, Difficulty::difficult}) {
      for (ToleranceLevel level :
           {ToleranceLevel::strict, ToleranceLevel::slight, ToleranceLevel::high}) {
        auto regime = regime_for(d, level);
        std::size_t expected = testsupport::brute_force_matching(pred, gt, regime);
        MatchResult r = match_triplets(pred, gt, regime);
        CHECK(r.matched_pairs.size() == expected);
      }
    }
  }
}

TEST_CASE("matched pairs form a partial one-to-one correspondence") {
  testsupport::TableGen gen(777);
  auto slight = regime_for(Difficulty::normal, ToleranceLevel::slight);
  for (int i = 0; i < 100; ++i) {
    TripletSet pred = gen.triplets(6);
    TripletSet gt = gen.triplets(6);
    MatchResult r = match_triplets(pred, gt, slight);
    std::set<std::size_t> p_used, g_used;
    for (auto [p, g] : r.matched_pairs) {
      CHECK(p_used.insert(p).second);
      CHECK(g_used.insert(g).second);
      CHECK(triplet_compatible(pred.items[p], gt.items[g], slight, {}));
    }
  }
}

TEST_CASE("image_score is invariant to transpose and shuffles") {
  testsupport::TableGen gen(4242);
  for (int i = 0; i < 60; ++i) {
    ChartTable gt = gen.table(6, 5);
    for (ToleranceLevel level :
         {ToleranceLevel::strict, ToleranceLevel::slight, ToleranceLevel::high}) {
      MatchResult base = image_score(gt, gt, ChartTypeId::bar, level);
      CHECK(base.pass);

      MatchResult flipped = image_score(transpose(gt), gt, ChartTypeId::bar, level);
      CHECK(flipped.pass);
      CHECK(flipped.precision == base.precision);
      CHECK(flipped.recall == base.recall);
      CHECK(flipped.matched_pairs.size() == base.matched_pairs.size());

      ChartTable shuffled = gt;
      gen.shuffle_rows(shuffled);
      gen.shuffle_cols(shuffled);
      MatchResult sh = image_score(shuffled, gt, ChartTypeId::bar, level);
      CHECK(sh.pass);
      CHECK(sh.matched_pairs.size() == base.matched_pairs.size());
    }
  }
}

TEST_CASE("values scaled by 1.04 pass slight and high, fail strict") {
  testsupport::TableGen gen(31);
  ChartTable gt = gen.table(5, 3);
  ChartTable pred = testsupport::scale_values(gt, 1.04);
  CHECK_FALSE(image_score(pred, gt, ChartTypeId::bar, ToleranceLevel::strict).pass);
  CHECK(image_score(pred, gt, ChartTypeId::bar, ToleranceLevel::slight).pass);
  CHECK(image_score(pred, gt, ChartTypeId::bar, ToleranceLevel::high).pass);
}

namespace {

ScrmSample sample(const std::string& id, ChartTypeId type, const std::string& pred,
                  const std::string& gt) {
  return {id, type, pred, gt};
}

std::string gt_csv() { return "Month,Sales\nJan,100\nFeb,200\nMar,400\n"; }

}  // namespace

TEST_CASE("scrm_evaluate identity scores 100 everywhere") {
  std::vector<ScrmSample> samples;
  for (ChartTypeId t : all_chart_types())
    samples.push_back(sample(std::string(chart_type_name(t)), t, gt_csv(), gt_csv()));
  ScrmReport r = scrm_evaluate(samples);
  for (double v : r.overall) CHECK(v == doctest::Approx(100.0));
  for (const auto& [type, scores] : r.per_type)
    for (double v : scores.ap) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("one perfect and one empty prediction give 50 at every level") {
  std::vector<ScrmSample> samples = {
      sample("good", ChartTypeId::bar, gt_csv(), gt_csv()),
      sample("bad", ChartTypeId::bar, "", gt_csv()),
  };
  ScrmReport r = scrm_evaluate(samples);
  for (double v : r.overall) CHECK(v == doctest::Approx(50.0));
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].first == "bad");
}

TEST_CASE("derived three-sample fixture: errors 0%, 4%, 20%") {
  // Hand-scored: the exact prediction passes every level; the 4% one passes
  // slight (0.05) and high (0.1) but not strict (0); the 20% one fails all.
  std::string exact = gt_csv();
  ChartTable gt = parse_csv(gt_csv());
  std::string four = serialize_csv(testsupport::scale_values(gt, 1.04));
  std::string twenty = serialize_csv(testsupport::scale_values(gt, 1.20));

  std::vector<ScrmSample> samples = {
      sample("s0", ChartTypeId::bar, exact, gt_csv()),
      sample("s4", ChartTypeId::bar, four, gt_csv()),
      sample("s20", ChartTypeId::bar, twenty, gt_csv()),
  };
  ScrmReport r = scrm_evaluate(samples);
  CHECK(r.overall[0] == doctest::Approx(33.33).epsilon(0.001));
  CHECK(r.overall[1] == doctest::Approx(66.67).epsilon(0.001));
  CHECK(r.overall[2] == doctest::Approx(66.67).epsilon(0.001));
}

TEST_CASE("monotonicity: strict <= slight <= high on noisy manifests") {
  testsupport::TableGen gen(999);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScrmSample> samples;
    for (int i = 0; i < 6; ++i) {
      ChartTable gt = gen.table(5, 3);
      double factor = 1.0 + 0.01 * static_cast<double>(gen.uniform(0, 40));
      ChartTable pred = testsupport::scale_values(gt, factor);
      ChartTypeId type = all_chart_types()[gen.uniform(0, 17)];
      samples.push_back(sample("s" + std::to_string(i), type,
                               serialize_csv(pred), serialize_csv(gt)));
    }
    ScrmReport r = scrm_evaluate(samples);
    CHECK(r.overall[0] <= r.overall[1]);
    CHECK(r.overall[1] <= r.overall[2]);
    for (const auto& [type, scores] : r.per_type) {
      CHECK(scores.ap[0] <= scores.ap[1]);
      CHECK(scores.ap[1] <= scores.ap[2]);
    }
  }
}

TEST_CASE("entity replacement is applied to both sides before matching") {
  // Prediction labels its only column differently; for a pie chart both
  // sides collapse to "value" and the sample passes.
  std::string pred = "Segment,Share\nA,40\nB,60\n";
  std::string gt = "Segment,Market Share (%)\nA,40\nB,60\n";
  ScrmReport pie = scrm_evaluate({sample("p", ChartTypeId::pie, pred, gt)});
  CHECK(pie.overall[0] == doctest::Approx(100.0));
  // For a bar chart the labels differ by more than any j_thr, so it fails.
  ScrmReport bar = scrm_evaluate({sample("b", ChartTypeId::bar, pred, gt)});
  CHECK(bar.overall[2] == doctest::Approx(0.0));
}

TEST_CASE("mean_f1 mode reports partial credit") {
  ChartTable gt = parse_csv("K,c\nr1,1\nr2,2\nr3,3\nr4,4");
  TripletSet full = to_triplets(gt);
  ChartTable pred = gt;
  pred.row_entities.pop_back();
  pred.cells.pop_back();

  ScrmConfig binary;
  ScrmConfig mean_f1;
  mean_f1.ap_mode = ApMode::mean_f1;
  std::vector<ScrmSample> samples = {
      sample("s", ChartTypeId::bar, serialize_csv(pred), serialize_csv(gt))};
  CHECK(scrm_evaluate(samples, binary).overall[0] == doctest::Approx(0.0));
  // precision 1, recall 3/4 -> F1 = 6/7
  CHECK(scrm_evaluate(samples, mean_f1).overall[0] ==
        doctest::Approx(100.0 * 6.0 / 7.0));
}

TEST_CASE("empty dataset throws") {
  CHECK_THROWS_AS(scrm_evaluate({}), EmptyDatasetError);
}

TEST_CASE("duplicate triplets need separate matches") {
  // Histogram-style repeats: two identical (bin, count) facts on the GT side
  // can absorb only as many identical predictions as exist.
  TripletSet pred;
  pred.items = {triplet("5-10", "count", "3")};
  TripletSet gt;
  gt.items = {triplet("5-10", "count", "3"), triplet("5-10", "count", "3")};
  MatchResult r = match_triplets(pred, gt,
                                 regime_for(Difficulty::normal, ToleranceLevel::strict));
  CHECK(r.matched_pairs.size() == 1);
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK_FALSE(r.pass);
}

TEST_CASE("evaluation is deterministic across repeated runs") {
  testsupport::TableGen gen(2024);
  std::vector<ScrmSample> samples;
  for (int i = 0; i < 10; ++i) {
    ChartTable gt = gen.table(6, 4, true, true);
    ChartTable pred = testsupport::scale_values(gt, 1.02);
    samples.push_back(sample("s" + std::to_string(i),
                             all_chart_types()[gen.uniform(0, 17)],
                             serialize_csv(pred), serialize_csv(gt)));
  }
  ScrmReport a = scrm_evaluate(samples);
  ScrmReport b = scrm_evaluate(samples);
  CHECK(a.overall == b.overall);
  for (const auto& [type, scores] : a.per_type) {
    CHECK(b.per_type.at(type).ap == scores.ap);
    CHECK(b.per_type.at(type).count == scores.count);
  }
}
