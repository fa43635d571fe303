#include "bitgrip/drop_controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bitgrip/error.hpp"

namespace bitgrip::control {

std::string_view to_string(DropMode mode) {
  return mode == DropMode::ClosedLoop ? "ClosedLoop" : "DumpAll";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TargetReached: return "TargetReached";
    case Termination::LoadExhausted: return "LoadExhausted";
    case Termination::MaxSteps: return "MaxSteps";
  }
  return "?";
}

DropMode drop_mode_from_string(std::string_view s) {
  if (s == "ClosedLoop" || s == "closed-loop") return DropMode::ClosedLoop;
  if (s == "DumpAll" || s == "dump-all") return DropMode::DumpAll;
  throw Error(ErrorCode::InvalidArgument, "unknown drop mode '" + std::string(s) + "'");
}

void ControllerConfig::validate() const {
  if (!(step_deg > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_deg must be > 0");
  if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 1");
  if (stop_margin_g < 0.0) throw Error(ErrorCode::InvalidArgument, "stop_margin_g must be >= 0");
  if (debounce_reads < 1) throw Error(ErrorCode::InvalidArgument, "debounce_reads must be >= 1");
  if (debounce_epsilon_g < 0.0) throw Error(ErrorCode::InvalidArgument, "debounce_epsilon_g must be >= 0");
  if (!(read_interval_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "read_interval_s must be > 0");
  if (!(stable_budget_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "stable_budget_s must be > 0");
}

ControllerConfig ControllerConfig::defaults_for(const food::PileModel& pile,
                                                const food::BeltAssemblySpec& belt,
                                                const scale::ScaleConfig& scale) {
  ControllerConfig cfg;
  cfg.stop_margin_g = 0.5 * food::mean_unit_mass_g(pile);
  cfg.debounce_epsilon_g = scale.quantum_g;
  cfg.max_steps = 3 * belt.compartment_count;
  return cfg;
}

std::optional<double> Debouncer::feed(const scale::ScaleReading& r) {
  if (!r.stable) {
    window_.clear();
    return std::nullopt;
  }
  // Drop older readings that disagree with the newest one.
  const double tol = epsilon_ + 1e-9;
  while (!window_.empty()) {
    const auto [lo, hi] = std::minmax_element(window_.begin(), window_.end());
    if (std::max(*hi, r.value_g) - std::min(*lo, r.value_g) <= tol) break;
    window_.erase(window_.begin());
  }
  window_.push_back(r.value_g);
  if (static_cast<int>(window_.size()) > reads_) window_.erase(window_.begin());
  if (static_cast<int>(window_.size()) == reads_) return window_.back();
  return std::nullopt;
}

double stable_read(scale::WeighingScale& scale, const ControllerConfig& cfg, double& clock_s) {
  Debouncer debounce(cfg.debounce_reads, cfg.debounce_epsilon_g);
  const double deadline = clock_s + cfg.stable_budget_s;
  while (clock_s <= deadline) {
    const auto reading = scale.read(clock_s);
    clock_s += cfg.read_interval_s;
    if (auto value = debounce.feed(reading)) return *value;
  }
  throw Error(ErrorCode::ScaleUnstableTimeout,
              "no stable reading within " + std::to_string(cfg.stable_budget_s) + " s");
}

DropResult drop_to_target(double target_g, food::HeldLoad& load, scale::SimulatedScale& scale,
                          const ControllerConfig& cfg, Rng& rng, double start_time_s) {
  if (!(target_g > 0.0)) throw Error(ErrorCode::InvalidTarget, "target must be > 0 g");
  cfg.validate();

  DropResult result;
  result.target_g = target_g;
  double clock = start_time_s;
  // The container only gains food, so the controller's running total never
  // moves backwards on a noisy reading.
  double cumulative = 0.0;

  auto record_step = [&](double true_drop) {
    scale.add_mass(true_drop, clock);
    clock += scale.config().settle_time_s;
    const double reading = stable_read(scale, cfg, clock);
    const double next = std::max(cumulative, reading);
    ++result.steps_used;
    result.trace.push_back({result.steps_used, next - cumulative, true_drop, next});
    result.true_dropped_g += true_drop;
    cumulative = next;
  };

  if (cfg.mode == DropMode::DumpAll) {
    record_step(food::dump_all(load));
    result.terminated_by = cumulative >= target_g - cfg.stop_margin_g ? Termination::TargetReached
                                                                      : Termination::LoadExhausted;
  } else {
    for (;;) {
      if (cumulative >= target_g - cfg.stop_margin_g) {
        result.terminated_by = Termination::TargetReached;
        break;
      }
      if (load.releasable_mass_g() <= 1e-9) {
        result.terminated_by = Termination::LoadExhausted;
        break;
      }
      if (result.steps_used >= cfg.max_steps) {
        result.terminated_by = Termination::MaxSteps;
        break;
      }
      record_step(food::release_step(load, cfg.step_deg, rng));
    }
  }

  result.dropped_g = cumulative;
  result.overshoot_g = result.dropped_g - target_g;
  result.elapsed_s = clock - start_time_s;
  return result;
}

double accuracy_pct(double target_g, double dropped_g) {
  if (!(target_g > 0.0)) throw Error(ErrorCode::InvalidTarget, "target must be > 0 g");
  return std::clamp(100.0 * (1.0 - std::abs(dropped_g - target_g) / target_g), 0.0, 100.0);
}

}  // namespace bitgrip::control
