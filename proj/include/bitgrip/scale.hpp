#pragma once

#include <cstdint>

#include "bitgrip/rng.hpp"

namespace bitgrip::scale {

struct ScaleConfig {
  double quantum_g = 0.1;
  double settle_time_s = 0.5;
  double noise_sd_g = 0.05;
  double max_capacity_g = 5000.0;

  void validate() const;
  bool operator==(const ScaleConfig&) const = default;
};

struct ScaleReading {
  double value_g = 0.0;
  bool stable = false;
  double timestamp_s = 0.0;
};

/// What a drop controller needs from a scale. A serial-port driver for a
/// physical scale implements this and nothing else.
class WeighingScale {
 public:
  virtual ~WeighingScale() = default;
  virtual ScaleReading read(double at_time_s) = 0;
  virtual void tare() = 0;
  virtual double quantum_g() const = 0;
};

/// Round-half-even to a multiple of quantum.
double quantize(double mass_g, double quantum_g);

/// Simulated scale: true mass, linear settling ramp after each change,
/// truncated Gaussian noise, quantized display.
class SimulatedScale final : public WeighingScale {
 public:
  SimulatedScale(ScaleConfig cfg, std::uint64_t noise_seed);
  SimulatedScale(ScaleConfig cfg, Rng noise);

  /// Adds mass onto the pan. Readings are unstable for settle_time_s after.
  void add_mass(double mass_g, double at_time_s);

  ScaleReading read(double at_time_s) override;
  void tare() override;
  double quantum_g() const override { return cfg_.quantum_g; }

  double true_mass_g() const { return true_mass_g_; }
  double net_true_mass_g() const { return true_mass_g_ - tare_g_; }
  const ScaleConfig& config() const { return cfg_; }

 private:
  ScaleConfig cfg_;
  Rng noise_;
  double true_mass_g_ = 0.0;
  double previous_mass_g_ = 0.0;
  double tare_g_ = 0.0;
  double last_change_s_ = -1e300;
};

}  // namespace bitgrip::scale
