#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitgrip/food_model.hpp"

namespace bitgrip::biteval {

struct ScoreWeights {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 2.0;

  void validate() const;
  bool operator==(const ScoreWeights&) const = default;

  static ScoreWeights spaghetti() { return {1.0, 1.0, 2.0}; }
  static ScoreWeights ikura() { return {1.0, 0.5, 1.0}; }
};

enum class DensityClass { High, Med, Low };

std::string_view to_string(DensityClass c);
DensityClass density_class_from_string(std::string_view s);
double nominal_density(DensityClass c);
/// Nearest of the three nominal classes (2, 1.5, 1 bits/cm²).
DensityClass classify_density(double bits_per_cm2);

struct SpaghettiTrial {
  double gripper_width_mm = 30.0;
  DensityClass density_class = DensityClass::Low;
  double density_per_cm2 = 1.0;
  double dropped_weight_g = 0.0;
  double accidental_drops = 0.0;
  double damaged_strands = 0.0;

  void validate() const;
  std::string label() const;
};

struct IkuraTrial {
  food::ScoopProfile scoop_profile = food::ScoopProfile::Circular;
  double dropped_weight_g = 0.0;
  double remaining_in_bit = 0.0;
  double ease_of_drop = 0.0;
  double drop_angle_deg = 90.0;

  void validate() const;
  std::string label() const;
};

/// w1·dropped − w2·accidental − w3·damaged
double score_spaghetti(const SpaghettiTrial& t, const ScoreWeights& w);
/// w1·dropped − w2·remaining + w3·ease
double score_ikura(const IkuraTrial& t, const ScoreWeights& w);

/// Replaceable heuristic mapping a drop angle to an ease score: 5·(180 − angle)/90.
double ease_from_drop_angle(double drop_angle_deg);

template <class Trial>
struct Ranked {
  Trial trial;
  double score = 0.0;
  std::size_t input_index = 0;
};

/// Descending by score; ties go to fewer damaged strands (spaghetti) or
/// fewer remaining balls (ikura), then to input order.
std::vector<Ranked<SpaghettiTrial>> rank_configs(std::span<const SpaghettiTrial> trials,
                                                 const ScoreWeights& w);
std::vector<Ranked<IkuraTrial>> rank_configs(std::span<const IkuraTrial> trials, const ScoreWeights& w);

/// Measured rows of the published selection experiments.
std::vector<SpaghettiTrial> spaghetti_reference_trials();
std::vector<double> spaghetti_reference_scores();
std::vector<IkuraTrial> ikura_reference_trials();
std::vector<double> ikura_reference_scores();
/// The five width/density configurations of the spaghetti selection run.
std::vector<food::BeltAssemblySpec> spaghetti_reference_grid();
std::vector<food::BeltAssemblySpec> ikura_reference_grid();

struct SweepOptions {
  int trials = 10;
  std::uint64_t seed = 0;
  /// Static drop motion: half a belt revolution at 20° per step.
  int release_steps = 9;
  double step_deg = 20.0;
};

struct SpaghettiSweepRow {
  food::BeltAssemblySpec config;
  SpaghettiTrial means;
  double score = 0.0;
};

struct IkuraSweepRow {
  food::BeltAssemblySpec config;
  IkuraTrial means;
  double score = 0.0;
};

/// Simulated selection experiment: per config and trial, pickup → transit →
/// fixed release, averaged over trials and scored. Trial t of every config
/// draws from the same stream, so identical configs give identical rows.
std::vector<SpaghettiSweepRow> sweep_spaghetti(std::span<const food::BeltAssemblySpec> grid,
                                               const food::SpaghettiPileModel& pile,
                                               const SweepOptions& opts,
                                               const ScoreWeights& w = ScoreWeights::spaghetti());
std::vector<IkuraSweepRow> sweep_ikura(std::span<const food::BeltAssemblySpec> grid,
                                       const food::GranularPileModel& pile, const SweepOptions& opts,
                                       const ScoreWeights& w = ScoreWeights::ikura());

/// CSV with header. Spaghetti columns: gripper_width_mm, bit_density,
/// dropped_weight_g, accidental_drops, damaged_strands[, performance_score].
/// bit_density is "High"/"Med"/"Low" or a number.
std::vector<SpaghettiTrial> read_spaghetti_csv(std::istream& in);
/// Ikura columns: scoop_profile, dropped_weight_g, remaining_in_bit,
/// ease_of_drop, drop_angle_deg[, performance_score].
std::vector<IkuraTrial> read_ikura_csv(std::istream& in);

std::string ranked_csv(std::span<const Ranked<SpaghettiTrial>> ranked);
std::string ranked_csv(std::span<const Ranked<IkuraTrial>> ranked);

}  // namespace bitgrip::biteval
