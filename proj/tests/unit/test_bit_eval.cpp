#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bitgrip/bit_eval.hpp"
#include "bitgrip/error.hpp"

using namespace bitgrip;
using namespace bitgrip::biteval;
using food::ScoopProfile;

TEST_CASE("spaghetti score examples") {
  const auto w = ScoreWeights::spaghetti();
  CHECK(score_spaghetti({20, DensityClass::High, 2.0, 42, 1, 4.8}, w) == doctest::Approx(31.4));
  CHECK(score_spaghetti({30, DensityClass::Med, 1.5, 41, 0.14, 2.28}, w) == doctest::Approx(36.30));
  CHECK(score_spaghetti({}, ScoreWeights{3, 7, 11}) == 0.0);
}

TEST_CASE("ikura score examples") {
  const auto w = ScoreWeights::ikura();
  CHECK(score_ikura({ScoopProfile::Circular, 11.206, 3.5, 4.3, 103}, w) == doctest::Approx(13.756));
  CHECK(score_ikura({ScoopProfile::Elliptical, 12.28, 5.8, 3.3, 122}, w) == doctest::Approx(12.68));
  CHECK(score_ikura({ScoopProfile::Conical, 7.401, 2.6, 3.62, 115}, w) == doctest::Approx(9.721));
}

TEST_CASE("reference tables reproduce within print rounding") {
  const auto st = spaghetti_reference_trials();
  const auto ss = spaghetti_reference_scores();
  REQUIRE(st.size() == ss.size());
  for (std::size_t i = 0; i < st.size(); ++i)
    CHECK(std::abs(score_spaghetti(st[i], ScoreWeights::spaghetti()) - ss[i]) <= 0.05);
  const auto it = ikura_reference_trials();
  const auto is = ikura_reference_scores();
  REQUIRE(it.size() == is.size());
  for (std::size_t i = 0; i < it.size(); ++i) CHECK(std::abs(score_ikura(it[i], ScoreWeights::ikura()) - is[i]) <= 0.05);
}

TEST_CASE("ranking winners") {
  const auto st = spaghetti_reference_trials();
  const auto r = rank_configs(st, ScoreWeights::spaghetti());
  CHECK(r.front().trial.gripper_width_mm == 30);
  CHECK(r.front().trial.density_class == DensityClass::Low);
  CHECK(r.front().score == doctest::Approx(47.34));

  const auto it = ikura_reference_trials();
  const auto ri = rank_configs(it, ScoreWeights::ikura());
  CHECK(ri.front().trial.scoop_profile == ScoopProfile::Circular);
  CHECK(ri.front().score == doctest::Approx(13.756));

  const std::vector<SpaghettiTrial> one{st[2]};
  const auto r1 = rank_configs(one, ScoreWeights::spaghetti());
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].input_index == 0);

  try {
    rank_configs(std::vector<IkuraTrial>{}, ScoreWeights::ikura());
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
}

TEST_CASE("ties go to fewer damaged strands, then input order") {
  const auto w = ScoreWeights{1, 0, 0};
  std::vector<SpaghettiTrial> t(3);
  t[0].dropped_weight_g = 10;
  t[0].damaged_strands = 3;
  t[1].dropped_weight_g = 10;
  t[1].damaged_strands = 1;
  t[2].dropped_weight_g = 10;
  t[2].damaged_strands = 3;
  const auto r = rank_configs(t, w);
  CHECK(r[0].input_index == 1);
  CHECK(r[1].input_index == 0);
  CHECK(r[2].input_index == 2);
}

TEST_CASE("property: ranking is a permutation, non-increasing, invariant under weight scaling") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    std::vector<SpaghettiTrial> t(n);
    for (auto& x : t) {
      x.dropped_weight_g = rng.uniform(0, 60);
      x.accidental_drops = rng.uniform(0, 2);
      x.damaged_strands = rng.uniform(0, 8);
    }
    const ScoreWeights w{rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.1, 3)};
    const auto r = rank_configs(t, w);
    REQUIRE(r.size() == n);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      idx.push_back(r[i].input_index);
      if (i) CHECK(r[i - 1].score >= r[i].score);
    }
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(idx[i] == i);

    const ScoreWeights w2{2 * w.w1, 2 * w.w2, 2 * w.w3};
    const auto r2 = rank_configs(t, w2);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r2[i].input_index == r[i].input_index);
      CHECK(r2[i].score == doctest::Approx(2 * r[i].score));
    }
  }
}

TEST_CASE("ease heuristic") {
  CHECK(ease_from_drop_angle(90) == doctest::Approx(5.0));
  CHECK(ease_from_drop_angle(180) == doctest::Approx(0.0));
}

TEST_CASE("density classes") {
  CHECK(classify_density(2.1) == DensityClass::High);
  CHECK(classify_density(1.5) == DensityClass::Med);
  CHECK(classify_density(0.9) == DensityClass::Low);
  CHECK(density_class_from_string("Med") == DensityClass::Med);
  CHECK(nominal_density(DensityClass::High) == 2.0);
}

TEST_CASE("trial validation") {
  SpaghettiTrial s;
  s.damaged_strands = -1;
  CHECK_THROWS_AS(s.validate(), Error);
  IkuraTrial i;
  i.drop_angle_deg = 180;
  CHECK_THROWS_AS(i.validate(), Error);
}

TEST_CASE("CSV ingestion") {
  std::istringstream sp(
      "gripper_width_mm,bit_density,dropped_weight_g,accidental_drops,damaged_strands,performance_score\n"
      "20,High,42,1,4.8,31.4\n"
      "30,1.5,41,0.14,2.28,36.3\n");
  const auto t = read_spaghetti_csv(sp);
  REQUIRE(t.size() == 2);
  CHECK(t[0].density_class == DensityClass::High);
  CHECK(t[1].density_class == DensityClass::Med);
  CHECK(t[1].density_per_cm2 == 1.5);

  std::istringstream ik(
      "scoop_profile,dropped_weight_g,remaining_in_bit,ease_of_drop,drop_angle_deg\n"
      "Circular,11.206,3.5,4.3,103\n");
  const auto k = read_ikura_csv(ik);
  REQUIRE(k.size() == 1);
  CHECK(score_ikura(k[0], ScoreWeights::ikura()) == doctest::Approx(13.756));

  std::istringstream empty("");
  try {
    read_spaghetti_csv(empty);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
  std::istringstream header_only("scoop_profile,dropped_weight_g,remaining_in_bit,ease_of_drop,drop_angle_deg\n");
  CHECK_THROWS_AS(read_ikura_csv(header_only), Error);
  std::istringstream wrong("a,b,c,d,e\n1,2,3,4,5\n");
  CHECK_THROWS_AS(read_spaghetti_csv(wrong), Error);
  std::istringstream bad_number(
      "gripper_width_mm,bit_density,dropped_weight_g,accidental_drops,damaged_strands\n30,Low,x,0,0\n");
  CHECK_THROWS_AS(read_spaghetti_csv(bad_number), Error);
}

TEST_CASE("ranked CSV layout") {
  const auto r = rank_configs(spaghetti_reference_trials(), ScoreWeights::spaghetti());
  const auto csv = ranked_csv(r);
  CHECK(csv.rfind("rank,gripper_width_mm,bit_density,", 0) == 0);
  CHECK(csv.find("1,30,Low,48.42,0.8,0.14,47.34\n") != std::string::npos);
}

TEST_CASE("sweep: reference grid keeps the Low > Med > High ordering at 30 mm") {
  const auto grid = spaghetti_reference_grid();
  SweepOptions opts;
  opts.trials = 30;
  opts.seed = 5;
  const auto rows = sweep_spaghetti(grid, food::SpaghettiPileModel{}, opts);
  REQUIRE(rows.size() == 5);
  const double high = rows[1].score, med = rows[3].score, low = rows[4].score;
  CHECK(low > med);
  CHECK(med > high);
}

TEST_CASE("sweep: one config one trial equals scoring its row") {
  const std::vector<food::BeltAssemblySpec> grid{food::BeltAssemblySpec::spaghetti(30, 1.0)};
  SweepOptions opts;
  opts.trials = 1;
  const auto rows = sweep_spaghetti(grid, food::SpaghettiPileModel{}, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].score == doctest::Approx(score_spaghetti(rows[0].means, ScoreWeights::spaghetti())));
}

TEST_CASE("sweep: identical configs give identical rows") {
  const std::vector<food::BeltAssemblySpec> grid{food::BeltAssemblySpec::spaghetti(30, 1.5),
                                                 food::BeltAssemblySpec::spaghetti(30, 1.5)};
  SweepOptions opts;
  opts.seed = 8;
  const auto rows = sweep_spaghetti(grid, food::SpaghettiPileModel{}, opts);
  CHECK(rows[0].score == rows[1].score);
  CHECK(rows[0].means.dropped_weight_g == rows[1].means.dropped_weight_g);

  const std::vector<food::BeltAssemblySpec> ig{food::BeltAssemblySpec::ikura(), food::BeltAssemblySpec::ikura()};
  const auto irows = sweep_ikura(ig, food::GranularPileModel{}, opts);
  CHECK(irows[0].score == irows[1].score);
}

TEST_CASE("sweep errors") {
  SweepOptions opts;
  opts.trials = 0;
  const std::vector<food::BeltAssemblySpec> grid{food::BeltAssemblySpec::spaghetti()};
  CHECK_THROWS_AS(sweep_spaghetti(grid, food::SpaghettiPileModel{}, opts), Error);
  opts.trials = 1;
  const std::vector<food::BeltAssemblySpec> wrong{food::BeltAssemblySpec::ikura()};
  CHECK_THROWS_AS(sweep_spaghetti(wrong, food::SpaghettiPileModel{}, opts), Error);
}
