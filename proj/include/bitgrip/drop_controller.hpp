#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bitgrip/food_model.hpp"
#include "bitgrip/rng.hpp"
#include "bitgrip/scale.hpp"

namespace bitgrip::control {

enum class DropMode { ClosedLoop, DumpAll };
enum class Termination { TargetReached, LoadExhausted, MaxSteps };

std::string_view to_string(DropMode mode);
std::string_view to_string(Termination t);
DropMode drop_mode_from_string(std::string_view s);

struct ControllerConfig {
  double step_deg = 20.0;
  /// Stop once the debounced reading is >= target - stop_margin_g.
  double stop_margin_g = 0.0;
  int debounce_reads = 3;
  double debounce_epsilon_g = 0.1;
  int max_steps = 54;
  DropMode mode = DropMode::ClosedLoop;
  double read_interval_s = 0.1;
  /// Simulated-time budget for one debounced read.
  double stable_budget_s = 10.0;

  void validate() const;
  bool operator==(const ControllerConfig&) const = default;

  /// Margin is half the food's release unit (one strand, one ball); epsilon
  /// is one scale quantum; max_steps is three belt revolutions' worth.
  static ControllerConfig defaults_for(const food::PileModel& pile, const food::BeltAssemblySpec& belt,
                                       const scale::ScaleConfig& scale);
};

struct TraceEntry {
  int step = 0;
  double drop_g = 0.0;       // increase of the cumulative reading
  double true_drop_g = 0.0;  // mass that actually left the belt
  double cumulative_g = 0.0;
};

struct DropResult {
  double target_g = 0.0;
  double dropped_g = 0.0;
  double true_dropped_g = 0.0;
  int steps_used = 0;
  double overshoot_g = 0.0;
  std::vector<TraceEntry> trace;
  Termination terminated_by = Termination::TargetReached;
  double elapsed_s = 0.0;
};

/// Accepts a value once `reads` consecutive stable readings lie within
/// `epsilon` of each other. An unstable reading clears the window.
class Debouncer {
 public:
  Debouncer(int reads, double epsilon) : reads_(reads), epsilon_(epsilon) {}

  std::optional<double> feed(const scale::ScaleReading& r);
  void reset() { window_.clear(); }

 private:
  int reads_;
  double epsilon_;
  std::vector<double> window_;
};

/// Polls the scale every read_interval_s starting at clock_s until the
/// debouncer accepts; clock_s is advanced past the last read.
double stable_read(scale::WeighingScale& scale, const ControllerConfig& cfg, double& clock_s);

/// Releases food from `load` onto `scale` until the target is met. The scale
/// must already be tared over the destination container.
DropResult drop_to_target(double target_g, food::HeldLoad& load, scale::SimulatedScale& scale,
                          const ControllerConfig& cfg, Rng& rng, double start_time_s = 0.0);

/// 100·(1 − |dropped − target|/target), clamped to [0, 100].
double accuracy_pct(double target_g, double dropped_g);

}  // namespace bitgrip::control
