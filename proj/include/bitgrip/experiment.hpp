#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitgrip/drop_controller.hpp"
#include "bitgrip/food_model.hpp"
#include "bitgrip/scale.hpp"

namespace bitgrip::control {

/// Everything one weight-class experiment needs besides targets and seed.
struct ExperimentSetup {
  std::string food_name = "spaghetti";
  food::PileModel pile = food::SpaghettiPileModel{};
  food::BeltAssemblySpec belt = food::BeltAssemblySpec::spaghetti();
  ControllerConfig controller{};
  scale::ScaleConfig scale{};
};

struct TrialRecord {
  std::string food;
  double target_g = 0.0;
  int trial = 0;
  double dropped_g = 0.0;
  int steps = 0;
  std::string terminated_by;
  double pickup_mass_g = 0.0;
  double true_dropped_g = 0.0;
  double transit_lost_g = 0.0;
  double remaining_g = 0.0;
  std::optional<std::string> error;
};

struct ClassSummary {
  double target_g = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_dropped_g = 0.0;
  /// accuracy_pct applied to the mean dropped weight.
  double accuracy_pct = 0.0;
  /// Sample standard deviation of dropped weights (0 for a single trial).
  double sd_g = 0.0;
  /// Mean of the per-trial accuracies, reported alongside.
  double mean_trial_accuracy_pct = 0.0;
};

struct ExperimentReport {
  std::string food;
  DropMode mode = DropMode::ClosedLoop;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;  // ordered by (class, trial)
  std::vector<ClassSummary> classes;
};

/// One full pickup → transit → drop cycle. Randomness comes from streams
/// keyed by (seed, class_index, trial), so trials can run in any order.
TrialRecord run_trial(const ExperimentSetup& setup, double target_g, int class_index, int trial,
                      std::uint64_t seed);

/// Runs trials_per_class trials for each target, optionally across worker
/// threads, and aggregates per class. Trial errors are recorded, not thrown.
ExperimentReport run_weight_class_experiment(const ExperimentSetup& setup,
                                             std::span<const double> targets, int trials_per_class,
                                             std::uint64_t seed, int parallel_trials = 1);

ClassSummary summarize_class(double target_g, std::span<const TrialRecord> trials);

/// CSV with header food,target_g,trial,dropped_g,steps,terminated_by.
std::string to_csv(const ExperimentReport& report);
nlohmann::json summary_json(const ExperimentReport& report);
std::string to_text(const ExperimentReport& report);

}  // namespace bitgrip::control
