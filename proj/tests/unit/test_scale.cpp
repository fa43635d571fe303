#include "doctest.h"

#include <cmath>

#include "bitgrip/error.hpp"
#include "bitgrip/scale.hpp"

using namespace bitgrip;
using namespace bitgrip::scale;

namespace {

ScaleConfig quiet() {
  ScaleConfig c;
  c.noise_sd_g = 0.0;
  return c;
}

bool is_multiple(double v, double q) {
  const double k = v / q;
  return std::abs(k - std::round(k)) < 1e-9;
}

}  // namespace

TEST_CASE("quantize rounds half to even") {
  CHECK(quantize(36.185, 0.1) == doctest::Approx(36.2));
  CHECK(quantize(0.25, 0.5) == 0.0);
  CHECK(quantize(0.75, 0.5) == 1.0);
  CHECK(quantize(2.5, 1.0) == 2.0);
  CHECK(quantize(3.5, 1.0) == 4.0);
  CHECK(!std::signbit(quantize(-0.01, 0.1)));
}

TEST_CASE("config validation") {
  ScaleConfig c;
  c.quantum_g = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.noise_sd_g = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.settle_time_s = -0.1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("add_mass examples") {
  SimulatedScale s(quiet(), 1);
  s.tare();
  s.add_mass(0.0, 0.0);
  CHECK(s.read(0.0).value_g == 0.0);
  CHECK(s.read(0.0).stable);

  s.add_mass(36.185, 1.0);
  CHECK(s.read(1.5).value_g == doctest::Approx(36.2));

  try {
    s.add_mass(5000.0, 2.0);
    FAIL("expected OverCapacity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverCapacity);
  }
  CHECK_THROWS_AS(s.add_mass(-1.0, 2.0), Error);
}

TEST_CASE("read examples") {
  SimulatedScale s(quiet(), 1);
  s.add_mass(4.8, 0.0);
  CHECK(s.read(0.2).stable == false);
  const auto r = s.read(0.6);
  CHECK(r.stable);
  CHECK(r.value_g == doctest::Approx(4.8));
  CHECK(r.timestamp_s == 0.6);
}

TEST_CASE("settling display ramps between old and new mass") {
  SimulatedScale s(quiet(), 1);
  s.add_mass(10.0, 0.0);
  const auto mid = s.read(0.25);
  CHECK_FALSE(mid.stable);
  CHECK(mid.value_g == doctest::Approx(5.0));
}

TEST_CASE("noise averages out") {
  SimulatedScale s(ScaleConfig{}, 77);
  s.add_mass(10.0, 0.0);
  double sum = 0;
  for (int i = 0; i < 1000; ++i) sum += s.read(1.0 + i * 0.1).value_g;
  CHECK(std::abs(sum / 1000 - 10.0) <= 0.01);
}

TEST_CASE("tare examples") {
  SimulatedScale s(quiet(), 1);
  s.add_mass(120.0, 0.0);
  s.tare();
  CHECK(s.read(1.0).value_g == 0.0);
  s.tare();
  CHECK(s.read(1.0).value_g == 0.0);
  s.add_mass(5.0, 2.0);
  CHECK(s.read(3.0).value_g == doctest::Approx(5.0));
  CHECK(s.net_true_mass_g() == doctest::Approx(5.0));
}

TEST_CASE("property: readings are multiples of the quantum, stable after settling") {
  Rng gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    ScaleConfig cfg;
    cfg.quantum_g = std::vector<double>{0.01, 0.1, 0.5, 1.0}[static_cast<std::size_t>(trial % 4)];
    cfg.noise_sd_g = gen.uniform(0.0, 0.2);
    cfg.settle_time_s = gen.uniform(0.0, 1.0);
    SimulatedScale s(cfg, static_cast<std::uint64_t>(trial));
    double t = 0.0;
    for (int k = 0; k < 20; ++k) {
      s.add_mass(gen.uniform(0.0, 10.0), t);
      const auto during = s.read(t + gen.uniform(0.0, cfg.settle_time_s));
      CHECK(is_multiple(during.value_g, cfg.quantum_g));
      t += cfg.settle_time_s;
      const auto after = s.read(t);
      CHECK(after.stable);
      CHECK(is_multiple(after.value_g, cfg.quantum_g));
      t += 0.1;
    }
  }
}

TEST_CASE("property: zero noise settled reading equals quantize(true mass)") {
  Rng gen(6);
  for (int trial = 0; trial < 500; ++trial) {
    SimulatedScale s(quiet(), 0);
    const double m = gen.uniform(0.0, 200.0);
    s.add_mass(m, 0.0);
    CHECK(s.read(1.0).value_g == quantize(m, 0.1));
  }
}
