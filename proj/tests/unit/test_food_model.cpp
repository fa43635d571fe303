#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bitgrip/error.hpp"
#include "bitgrip/food_model.hpp"

using namespace bitgrip;
using namespace bitgrip::food;

namespace {

HeldLoad spaghetti_load(std::uint64_t seed, const BeltAssemblySpec& belt = BeltAssemblySpec::spaghetti()) {
  Rng rng(seed);
  return pickup(SpaghettiPileModel{}, belt, rng);
}

}  // namespace

TEST_CASE("belt presets validate") {
  CHECK_NOTHROW(BeltAssemblySpec::spaghetti(30, 1.0).validate());
  CHECK_NOTHROW(BeltAssemblySpec::ikura(ScoopProfile::Conical).validate());
  CHECK_NOTHROW(BeltAssemblySpec::plain().validate());
  CHECK(BeltAssemblySpec::plain().bit_density_per_cm2 == 0.0);

  auto bad = BeltAssemblySpec::spaghetti();
  bad.gripper_width_mm = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = BeltAssemblySpec::spaghetti();
  bad.compartment_count = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = BeltAssemblySpec::plain();
  bad.bit_density_per_cm2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("enum names round-trip") {
  for (auto k : {FoodKind::LongEntangled, FoodKind::GranularSlippery, FoodKind::PlainBelt})
    CHECK(food_kind_from_string(to_string(k)) == k);
  for (auto p : {ScoopProfile::Conical, ScoopProfile::Elliptical, ScoopProfile::Circular})
    CHECK(scoop_profile_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(scoop_profile_from_string("Square"), Error);
}

TEST_CASE("session drift stays within 0.8 to 1.2") {
  SessionDrift d;
  for (int t = 0; t < 100; ++t) {
    CHECK(d.factor(t) >= 0.8 - 1e-12);
    CHECK(d.factor(t) <= 1.2 + 1e-12);
  }
  CHECK(d.factor(0) == doctest::Approx(1.0));
  CHECK(d.factor(5) == doctest::Approx(1.2));
}

TEST_CASE("pile validation") {
  SpaghettiPileModel s;
  s.stickiness = 1.5;
  CHECK_THROWS_AS(s.validate(), Error);
  GranularPileModel g;
  g.slip_prob = -0.1;
  CHECK_THROWS_AS(g.validate(), Error);
  g = {};
  g.ball_weight_g_mean = 0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("plain belt on spaghetti holds a 10 to 12 g clump") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto load = spaghetti_load(seed, BeltAssemblySpec::plain());
    CHECK(load.total_mass_g() >= 10.0 - 1e-9);
    CHECK(load.total_mass_g() <= 12.0 + 1e-9);
  }
}

TEST_CASE("plain belt cannot pick ikura") {
  Rng rng(1);
  const auto load = pickup(GranularPileModel{}, BeltAssemblySpec::plain(), rng);
  CHECK(load.total_mass_g() == 0.0);
  CHECK(load.empty());
}

TEST_CASE("pickup errors") {
  Rng rng(1);
  SpaghettiPileModel empty;
  empty.total_strands = 0;
  CHECK_THROWS_WITH_AS(pickup(empty, BeltAssemblySpec::spaghetti(), rng), doctest::Contains("EmptyPile"), Error);
  GranularPileModel no_balls;
  no_balls.total_balls = 0;
  CHECK_THROWS_AS(pickup(no_balls, BeltAssemblySpec::ikura(), rng), Error);
  try {
    pickup(GranularPileModel{}, BeltAssemblySpec::spaghetti(), rng);
    FAIL("expected KindMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KindMismatch);
  }
  try {
    pickup(SpaghettiPileModel{}, BeltAssemblySpec::ikura(), rng);
    FAIL("expected KindMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KindMismatch);
  }
}

TEST_CASE("bit-equipped spaghetti pickup fills near capacity") {
  const SpaghettiPileModel pile;
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto load = spaghetti_load(seed);
    const double cap_hi = pile.pickup_capacity_g * (1 + pile.capacity_noise);
    CHECK(load.total_mass_g() <= cap_hi + 1e-9);
    CHECK(load.total_mass_g() >= pile.pickup_capacity_g * (1 - pile.capacity_noise) - pile.strand_weight_max_g);
    sum += load.total_mass_g();
    for (const auto& c : load.compartments())
      for (const auto& s : std::get<StrandCompartment>(c).strands) {
        CHECK(s.weight_g >= pile.strand_weight_min_g);
        CHECK(s.weight_g <= pile.strand_weight_max_g);
      }
  }
  CHECK(sum / 200 == doctest::Approx(pile.pickup_capacity_g).epsilon(0.05));
}

TEST_CASE("capacity ordering: plain belt picks less than bits, every seed") {
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    CHECK(spaghetti_load(seed, BeltAssemblySpec::plain()).total_mass_g() < spaghetti_load(seed).total_mass_g());
}

TEST_CASE("a single 3.47 g strand at the release point drops 3.47 g") {
  const auto belt = BeltAssemblySpec::spaghetti();
  std::vector<StrandCompartment> comps(belt.compartment_count);
  comps[0].strands.push_back({0, 3.47});
  comps[5].strands.push_back({1, 4.0});
  auto load = HeldLoad::from_strands(belt, comps, {}, 0.5);
  Rng rng(5);
  CHECK(release_step(load, 20.0, rng) == doctest::Approx(3.47));
  CHECK(load.total_mass_g() == doctest::Approx(4.0));
}

TEST_CASE("entangled neighbours co-release with certainty at stickiness 1") {
  const auto belt = BeltAssemblySpec::spaghetti();
  std::vector<StrandCompartment> comps(belt.compartment_count);
  comps[0].strands.push_back({0, 3.0});
  comps[4].strands.push_back({1, 4.0});
  comps[9].strands.push_back({2, 5.0});
  auto load = HeldLoad::from_strands(belt, comps, {{0, 1}, {1, 2}}, 1.0);
  Rng rng(1);
  CHECK(release_step(load, 20.0, rng) == doctest::Approx(12.0));
  CHECK(load.empty());

  auto loose = HeldLoad::from_strands(belt, comps, {{0, 1}, {1, 2}}, 0.0);
  CHECK(release_step(loose, 20.0, rng) == doctest::Approx(3.0));
}

TEST_CASE("empty loads release nothing") {
  HeldLoad load;
  Rng rng(1);
  CHECK(release_step(load, 20.0, rng) == 0.0);
  CHECK(load.empty());
  CHECK(dump_all(load) == 0.0);
  CHECK_THROWS_AS(release_step(load, 0.0, rng), Error);
  CHECK_THROWS_AS(release_step(load, -20.0, rng), Error);
}

TEST_CASE("dump_all drops the entire load") {
  const auto belt = BeltAssemblySpec::spaghetti();
  std::vector<StrandCompartment> comps(3);
  comps[0].strands.push_back({0, 3.0});
  comps[1].strands.push_back({1, 3.22});
  comps[2].strands.push_back({2, 3.0});
  auto load = HeldLoad::from_strands(belt, comps, {}, 0.5);
  CHECK(dump_all(load) == doctest::Approx(9.22));
  CHECK(load.total_mass_g() == 0.0);
  CHECK(load.compartments().empty());

  auto big = spaghetti_load(3);
  const double m = big.total_mass_g();
  CHECK(dump_all(big) == doctest::Approx(m));
  CHECK(big.total_mass_g() == 0.0);
}

TEST_CASE("transit rates follow the calibration knots") {
  CHECK(transit_rates(2.0).accidental_strands == doctest::Approx(0.5));
  CHECK(transit_rates(2.0).damaged_strands == doctest::Approx(5.83));
  CHECK(transit_rates(1.0).accidental_strands == doctest::Approx(0.8));
  CHECK(transit_rates(1.0).damaged_strands == doctest::Approx(0.14));
  CHECK(transit_rates(0.0).damaged_strands == 0.0);
  for (double d = 0.0; d < 3.0; d += 0.05) CHECK(transit_rates(d + 0.05).damaged_strands >= transit_rates(d).damaged_strands);
}

TEST_CASE("transit effects reproduce the density trend in expectation") {
  auto mean_counts = [](double density) {
    double acc = 0, dmg = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      auto load = spaghetti_load(static_cast<std::uint64_t>(i), BeltAssemblySpec::spaghetti(30, density));
      Rng rng = Rng::derive(99, {static_cast<std::uint64_t>(i)});
      transit_effects(load, rng);
      acc += load.transit_loss_tally();
      dmg += load.damage_tally();
    }
    return std::pair{acc / n, dmg / n};
  };
  const auto [acc_hi, dmg_hi] = mean_counts(2.0);
  CHECK(acc_hi == doctest::Approx(0.5).epsilon(0.15));
  CHECK(dmg_hi == doctest::Approx(5.83).epsilon(0.05));
  const auto [acc_lo, dmg_lo] = mean_counts(1.0);
  CHECK(acc_lo == doctest::Approx(0.8).epsilon(0.1));
  CHECK(dmg_lo == doctest::Approx(0.14).epsilon(0.3));

  auto plain = spaghetti_load(1, BeltAssemblySpec::plain());
  Rng rng(1);
  transit_effects(plain, rng);
  CHECK(plain.damage_tally() == 0);
}

TEST_CASE("transit effects reject granular loads") {
  Rng rng(2);
  auto load = pickup(GranularPileModel{}, BeltAssemblySpec::ikura(), rng);
  try {
    transit_effects(load, rng);
    FAIL("expected KindMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KindMismatch);
  }
}

TEST_CASE("bucket payloads follow the profile factor") {
  auto mean_balls = [](ScoopProfile p) {
    double n = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
      Rng rng(s);
      const auto load = pickup(GranularPileModel{}, BeltAssemblySpec::ikura(p), rng);
      for (const auto& c : load.compartments()) n += static_cast<double>(std::get<Bucket>(c).balls_g.size());
    }
    return n / 300;
  };
  const double circ = mean_balls(ScoopProfile::Circular);
  CHECK(mean_balls(ScoopProfile::Elliptical) > circ);
  CHECK(mean_balls(ScoopProfile::Conical) < circ);
  CHECK(mean_balls(ScoopProfile::Conical) / circ == doctest::Approx(0.66).epsilon(0.1));
}

// ---------------------------------------------------------------------------
// Properties over seeded runs.

TEST_CASE("property: mass conservation, monotone depletion, invariants") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const bool granular = seed % 2 == 1;
    HeldLoad load = granular ? pickup(GranularPileModel{}, BeltAssemblySpec::ikura(ScoopProfile(seed % 3)), rng)
                             : pickup(SpaghettiPileModel{}.at_trial(static_cast<int>(seed)),
                                      BeltAssemblySpec::spaghetti(30, 1.0 + (seed % 3) * 0.5), rng);
    const double picked = load.total_mass_g();
    if (!granular) transit_effects(load, rng);
    double drops = 0.0;
    double prev = load.total_mass_g();
    for (int step = 0; step < 60; ++step) {
      const double d = release_step(load, 20.0, rng);
      REQUIRE(d >= 0.0);
      drops += d;
      REQUIRE(load.total_mass_g() <= prev + 1e-12);
      prev = load.total_mass_g();
      REQUIRE_NOTHROW(load.check_invariants());
    }
    CHECK(std::abs(picked - (drops + load.transit_lost_mass_g() + load.total_mass_g())) <= 1e-9);
    CHECK(std::abs(drops - load.released_mass_g()) <= 1e-9);
  }
}

TEST_CASE("property: identical seeds give identical load sequences") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng a(seed), b(seed);
    auto la = pickup(SpaghettiPileModel{}, BeltAssemblySpec::spaghetti(), a);
    auto lb = pickup(SpaghettiPileModel{}, BeltAssemblySpec::spaghetti(), b);
    REQUIRE(la == lb);
    transit_effects(la, a);
    transit_effects(lb, b);
    REQUIRE(la == lb);
    for (int i = 0; i < 20; ++i) {
      CHECK(release_step(la, 20, a) == release_step(lb, 20, b));
      REQUIRE(la == lb);
    }
  }
}

TEST_CASE("property: single-step drops include single strands and 2-3 ball drops") {
  bool strand_sized = false;
  bool ball_sized = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    auto s = pickup(SpaghettiPileModel{}, BeltAssemblySpec::spaghetti(), rng);
    auto g = pickup(GranularPileModel{}, BeltAssemblySpec::ikura(), rng);
    for (int i = 0; i < 20; ++i) {
      const double ds = release_step(s, 20, rng);
      if (ds >= 3.0 && ds <= 6.0) strand_sized = true;
      const double dg = release_step(g, 20, rng);
      if (dg >= 1.5 && dg <= 3.5) ball_sized = true;
    }
  }
  CHECK(strand_sized);
  CHECK(ball_sized);
}
