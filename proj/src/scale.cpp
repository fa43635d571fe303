#include "bitgrip/scale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bitgrip/error.hpp"

namespace bitgrip::scale {

void ScaleConfig::validate() const {
  if (!(quantum_g > 0.0)) throw Error(ErrorCode::InvalidArgument, "quantum_g must be > 0");
  if (settle_time_s < 0.0) throw Error(ErrorCode::InvalidArgument, "settle_time_s must be >= 0");
  if (noise_sd_g < 0.0) throw Error(ErrorCode::InvalidArgument, "noise_sd_g must be >= 0");
  if (!(max_capacity_g > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_capacity_g must be > 0");
}

double quantize(double mass_g, double quantum_g) {
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  return std::nearbyint(mass_g / quantum_g) * quantum_g + 0.0;  // no negative zero
}

SimulatedScale::SimulatedScale(ScaleConfig cfg, std::uint64_t noise_seed)
    : SimulatedScale(cfg, Rng(noise_seed)) {}

SimulatedScale::SimulatedScale(ScaleConfig cfg, Rng noise) : cfg_(cfg), noise_(std::move(noise)) {
  cfg_.validate();
}

void SimulatedScale::add_mass(double mass_g, double at_time_s) {
  if (mass_g < 0.0) throw Error(ErrorCode::InvalidArgument, "cannot add negative mass");
  if (true_mass_g_ + mass_g > cfg_.max_capacity_g)
    throw Error(ErrorCode::OverCapacity, "load of " + std::to_string(true_mass_g_ + mass_g) +
                                             " g exceeds " + std::to_string(cfg_.max_capacity_g) + " g");
  if (mass_g == 0.0) return;
  previous_mass_g_ = true_mass_g_;
  true_mass_g_ += mass_g;
  last_change_s_ = at_time_s;
}

ScaleReading SimulatedScale::read(double at_time_s) {
  const double elapsed = at_time_s - last_change_s_;
  // Tolerate clock round-off from summed step times.
  const bool stable = elapsed >= cfg_.settle_time_s - 1e-9;
  double shown = true_mass_g_;
  if (!stable) {
    const double progress = cfg_.settle_time_s > 0.0 ? std::clamp(elapsed / cfg_.settle_time_s, 0.0, 1.0) : 1.0;
    shown = previous_mass_g_ + (true_mass_g_ - previous_mass_g_) * progress;
  }
  const double noise = noise_.truncated_normal(0.0, cfg_.noise_sd_g, 4.0);
  return {quantize(shown - tare_g_ + noise, cfg_.quantum_g), stable, at_time_s};
}

void SimulatedScale::tare() {
  tare_g_ = true_mass_g_;
}

}  // namespace bitgrip::scale
