#pragma once

#include <cstdint>
#include <deque>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bitgrip/rng.hpp"

namespace bitgrip::food {

enum class FoodKind { LongEntangled, GranularSlippery, PlainBelt };
enum class ScoopProfile { Conical, Elliptical, Circular };

std::string_view to_string(FoodKind kind);
std::string_view to_string(ScoopProfile profile);
FoodKind food_kind_from_string(std::string_view s);
ScoopProfile scoop_profile_from_string(std::string_view s);

/// Geometry of one belt assembly. Fields that do not apply to the food kind
/// are carried but ignored (density/angle for buckets, bucket size for spokes).
struct BeltAssemblySpec {
  FoodKind food_kind = FoodKind::LongEntangled;
  double gripper_width_mm = 30.0;
  double bit_density_per_cm2 = 1.0;
  double bit_angle_deg = 45.0;
  double bucket_width_mm = 25.0;
  double bucket_length_mm = 50.0;
  ScoopProfile scoop_profile = ScoopProfile::Circular;
  double bit_pitch_mm = 6.0;
  int compartment_count = 18;

  void validate() const;
  bool operator==(const BeltAssemblySpec&) const = default;

  static BeltAssemblySpec spaghetti(double gripper_width_mm = 30.0, double density_per_cm2 = 1.0);
  static BeltAssemblySpec ikura(ScoopProfile profile = ScoopProfile::Circular);
  /// Bits removed. Used as the ablation baseline.
  static BeltAssemblySpec plain();
};

/// Multiplies entanglement and stickiness by 1 + amplitude·sin(2π·trial/period).
struct SessionDrift {
  double amplitude = 0.2;
  int period_trials = 20;

  double factor(int trial_index) const;
  bool operator==(const SessionDrift&) const = default;
};

struct SpaghettiPileModel {
  int total_strands = 200;
  double strand_weight_min_g = 3.0;
  double strand_weight_max_g = 6.0;
  double entanglement_prob = 0.02;
  double stickiness = 0.5;
  SessionDrift drift{};
  double pickup_capacity_g = 90.0;
  double capacity_noise = 0.10;
  double plain_pickup_min_g = 10.0;
  double plain_pickup_max_g = 12.0;

  double mean_strand_weight_g() const { return 0.5 * (strand_weight_min_g + strand_weight_max_g); }
  double mass_g() const { return total_strands * mean_strand_weight_g(); }
  /// Copy with session drift for the given trial applied.
  SpaghettiPileModel at_trial(int trial_index) const;
  void validate() const;
  bool operator==(const SpaghettiPileModel&) const = default;

  /// Heavier entanglement, used to reproduce the closed-loop 30 g spaghetti row.
  static SpaghettiPileModel high_entanglement_session();
};

struct GranularPileModel {
  int total_balls = 500;
  double ball_weight_g_mean = 1.0;
  double ball_weight_g_sd = 0.1;
  double slip_prob = 0.05;
  int bucket_capacity_min_balls = 2;
  int bucket_capacity_max_balls = 6;
  /// Per-ball fall probability for a 20° tip of a circular scoop.
  double release_prob_per_20deg = 0.30;

  double mass_g() const { return total_balls * ball_weight_g_mean; }
  void validate() const;
  bool operator==(const GranularPileModel&) const = default;
};

using PileModel = std::variant<SpaghettiPileModel, GranularPileModel>;

FoodKind pile_kind(const PileModel& pile);
double pile_mass_g(const PileModel& pile);
PileModel pile_at_trial(const PileModel& pile, int trial_index);
/// Mass of the smallest release unit (one strand or one ball), on average.
double mean_unit_mass_g(const PileModel& pile);

double payload_factor(ScoopProfile profile);
/// Ease-of-drop relative to the circular scoop.
double relative_ease(ScoopProfile profile);
/// Nominal drop angle measured for each scoop curve.
double nominal_drop_angle_deg(ScoopProfile profile);

/// Expected per-trial transit counts for spaghetti at a bit density.
struct TransitRates {
  double accidental_strands = 0.0;
  double damaged_strands = 0.0;
};

TransitRates transit_rates(double bit_density_per_cm2);

struct Strand {
  std::uint32_t id = 0;
  double weight_g = 0.0;
  bool operator==(const Strand&) const = default;
};

struct StrandCompartment {
  std::vector<Strand> strands;
  bool operator==(const StrandCompartment&) const = default;
};

struct Bucket {
  std::vector<double> balls_g;
  double tilt_deg = 0.0;
  bool operator==(const Bucket&) const = default;
};

using Compartment = std::variant<StrandCompartment, Bucket>;
using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Food currently on the belt. Compartments are ordered by belt position,
/// front() being the one at the release point.
class HeldLoad {
 public:
  HeldLoad() = default;

  /// Builds a strand load directly. Strand ids must be unique; edges refer to them.
  static HeldLoad from_strands(const BeltAssemblySpec& belt,
                               std::vector<StrandCompartment> compartments,
                               std::vector<Edge> edges, double stickiness);
  static HeldLoad from_buckets(const BeltAssemblySpec& belt, std::vector<Bucket> buckets,
                               double release_prob_per_20deg);

  FoodKind food_kind() const { return food_kind_; }
  bool plain_belt() const { return plain_belt_; }
  const std::deque<Compartment>& compartments() const { return compartments_; }
  const std::vector<Bucket>& passed_buckets() const { return passed_; }
  const std::vector<Edge>& entanglement_edges() const { return edges_; }
  double stickiness() const { return stickiness_; }

  double total_mass_g() const { return total_mass_g_; }
  double releasable_mass_g() const;
  bool empty() const { return total_mass_g_ <= 1e-9; }
  std::size_t held_strand_count() const;
  /// Balls stuck in buckets that already passed the release point.
  int remaining_in_bits() const;

  int damage_tally() const { return damage_tally_; }
  int transit_loss_tally() const { return transit_loss_tally_; }
  double transit_lost_mass_g() const { return transit_lost_mass_g_; }
  double released_mass_g() const { return released_mass_g_; }

  /// Recomputes the mass from compartment contents and compares to the
  /// tracked total. Throws std::logic_error on mismatch.
  void check_invariants() const;

  bool operator==(const HeldLoad&) const = default;

 private:
  friend HeldLoad pickup(const PileModel&, const BeltAssemblySpec&, Rng&);
  friend double release_step(HeldLoad&, double, Rng&);
  friend double dump_all(HeldLoad&);
  friend void transit_effects(HeldLoad&, Rng&);

  double recompute_mass() const;
  void index_strands();
  void remove_strand(std::uint32_t id);
  double release_strands(double step_deg, Rng& rng);
  double release_balls(double step_deg, Rng& rng);

  FoodKind food_kind_ = FoodKind::LongEntangled;
  bool plain_belt_ = false;
  double bit_density_ = 0.0;
  int compartment_count_ = 1;
  std::deque<Compartment> compartments_;
  std::vector<Bucket> passed_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  // Absolute slot of each strand id (popped_ + deque index), -1 once gone.
  std::vector<long> strand_slot_;
  long popped_ = 0;
  double belt_angle_deg_ = 0.0;
  double stickiness_ = 0.0;
  double release_prob_per_20deg_ = 0.0;

  double total_mass_g_ = 0.0;
  double released_mass_g_ = 0.0;
  double transit_lost_mass_g_ = 0.0;
  int damage_tally_ = 0;
  int transit_loss_tally_ = 0;
};

/// Picks food from the pile. Bit-equipped spaghetti belts fill to a noisy
/// capacity; a plain belt holds a 10–12 g clump of spaghetti and no ikura.
HeldLoad pickup(const PileModel& pile, const BeltAssemblySpec& belt, Rng& rng);

/// Advances the belt by step_deg and returns the mass that fell off.
double release_step(HeldLoad& load, double step_deg, Rng& rng);

/// Drops everything at once. Returns the mass released.
double dump_all(HeldLoad& load);

/// Samples accidental strand losses and bit damage during transfer.
void transit_effects(HeldLoad& load, Rng& rng);

}  // namespace bitgrip::food
