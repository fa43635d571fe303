#include "bitgrip/food_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bitgrip/error.hpp"

namespace bitgrip::food {

namespace {

constexpr double kMassTolerance = 1e-9;

// Measured 30 mm gripper means per density, with the bare belt pinned at zero.
struct RateKnot {
  double density;
  double accidental;
  double damaged;
};
constexpr std::array<RateKnot, 4> kRateKnots{{
    {0.0, 0.0, 0.0},
    {1.0, 0.8, 0.14},
    {1.5, 0.14, 2.28},
    {2.0, 0.5, 5.83},
}};

double interpolate(double x, double RateKnot::*field) {
  const auto& k = kRateKnots;
  if (x <= k.front().density) return k.front().*field;
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (x <= k[i].density || i + 1 == k.size()) {
      const double t = (x - k[i - 1].density) / (k[i].density - k[i - 1].density);
      return std::max(0.0, k[i - 1].*field + t * (k[i].*field - k[i - 1].*field));
    }
  }
  return k.back().*field;
}

double sum_compartment(const Compartment& c) {
  return std::visit(
      [](const auto& comp) {
        double s = 0.0;
        if constexpr (std::is_same_v<std::decay_t<decltype(comp)>, StrandCompartment>) {
          for (const auto& strand : comp.strands) s += strand.weight_g;
        } else {
          for (double b : comp.balls_g) s += b;
        }
        return s;
      },
      c);
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

std::string_view to_string(FoodKind kind) {
  switch (kind) {
    case FoodKind::LongEntangled: return "LongEntangled";
    case FoodKind::GranularSlippery: return "GranularSlippery";
    case FoodKind::PlainBelt: return "PlainBelt";
  }
  return "?";
}

std::string_view to_string(ScoopProfile profile) {
  switch (profile) {
    case ScoopProfile::Conical: return "Conical";
    case ScoopProfile::Elliptical: return "Elliptical";
    case ScoopProfile::Circular: return "Circular";
  }
  return "?";
}

FoodKind food_kind_from_string(std::string_view s) {
  if (s == "LongEntangled") return FoodKind::LongEntangled;
  if (s == "GranularSlippery") return FoodKind::GranularSlippery;
  if (s == "PlainBelt") return FoodKind::PlainBelt;
  throw Error(ErrorCode::InvalidArgument, "unknown food kind '" + std::string(s) + "'");
}

ScoopProfile scoop_profile_from_string(std::string_view s) {
  if (s == "Conical") return ScoopProfile::Conical;
  if (s == "Elliptical") return ScoopProfile::Elliptical;
  if (s == "Circular") return ScoopProfile::Circular;
  throw Error(ErrorCode::InvalidArgument, "unknown scoop profile '" + std::string(s) + "'");
}

void BeltAssemblySpec::validate() const {
  require(gripper_width_mm > 0.0, "gripper_width_mm must be > 0");
  require(compartment_count >= 1, "compartment_count must be >= 1");
  require(bit_pitch_mm >= 0.0, "bit_pitch_mm must be >= 0");
  if (food_kind == FoodKind::PlainBelt) {
    require(bit_density_per_cm2 == 0.0, "a plain belt carries no bits");
  } else if (food_kind == FoodKind::LongEntangled) {
    require(bit_density_per_cm2 > 0.0, "bit_density_per_cm2 must be > 0");
    require(bit_angle_deg > 0.0 && bit_angle_deg < 180.0, "bit_angle_deg out of range");
  } else {
    require(bucket_width_mm > 0.0 && bucket_length_mm > 0.0, "bucket size must be > 0");
  }
}

BeltAssemblySpec BeltAssemblySpec::spaghetti(double gripper_width_mm, double density_per_cm2) {
  BeltAssemblySpec b;
  b.food_kind = FoodKind::LongEntangled;
  b.gripper_width_mm = gripper_width_mm;
  b.bit_density_per_cm2 = density_per_cm2;
  // Square grid: spacing in mm for the given areal density.
  b.bit_pitch_mm = 10.0 / std::sqrt(density_per_cm2);
  return b;
}

BeltAssemblySpec BeltAssemblySpec::ikura(ScoopProfile profile) {
  BeltAssemblySpec b;
  b.food_kind = FoodKind::GranularSlippery;
  b.gripper_width_mm = 25.0;
  b.bit_density_per_cm2 = 0.0;
  b.bucket_width_mm = 25.0;
  b.bucket_length_mm = 50.0;
  b.scoop_profile = profile;
  b.bit_pitch_mm = 25.0;
  return b;
}

BeltAssemblySpec BeltAssemblySpec::plain() {
  BeltAssemblySpec b;
  b.food_kind = FoodKind::PlainBelt;
  b.bit_density_per_cm2 = 0.0;
  b.bit_pitch_mm = 0.0;
  b.compartment_count = 1;
  return b;
}

double SessionDrift::factor(int trial_index) const {
  if (period_trials <= 0) return 1.0;
  return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * trial_index / period_trials);
}

SpaghettiPileModel SpaghettiPileModel::at_trial(int trial_index) const {
  SpaghettiPileModel p = *this;
  const double f = drift.factor(trial_index);
  p.entanglement_prob = std::clamp(entanglement_prob * f, 0.0, 1.0);
  p.stickiness = std::clamp(stickiness * f, 0.0, 1.0);
  return p;
}

void SpaghettiPileModel::validate() const {
  require(total_strands >= 0, "total_strands must be >= 0");
  require(strand_weight_min_g > 0.0 && strand_weight_max_g >= strand_weight_min_g,
          "strand weight interval invalid");
  require(entanglement_prob >= 0.0 && entanglement_prob <= 1.0, "entanglement_prob not in [0,1]");
  require(stickiness >= 0.0 && stickiness <= 1.0, "stickiness not in [0,1]");
  require(pickup_capacity_g >= strand_weight_max_g, "pickup_capacity_g below one strand");
  require(capacity_noise >= 0.0 && capacity_noise < 1.0, "capacity_noise not in [0,1)");
  require(plain_pickup_min_g > 0.0 && plain_pickup_max_g >= plain_pickup_min_g,
          "plain pickup interval invalid");
  require(std::abs(drift.amplitude) <= 1.0, "drift amplitude must be within [-1,1]");
}

SpaghettiPileModel SpaghettiPileModel::high_entanglement_session() {
  SpaghettiPileModel p;
  p.entanglement_prob = 0.06;
  return p;
}

void GranularPileModel::validate() const {
  require(total_balls >= 0, "total_balls must be >= 0");
  require(ball_weight_g_mean > 0.0, "ball_weight_g_mean must be > 0");
  require(ball_weight_g_sd >= 0.0, "ball_weight_g_sd must be >= 0");
  require(slip_prob >= 0.0 && slip_prob <= 1.0, "slip_prob not in [0,1]");
  require(bucket_capacity_min_balls >= 0 && bucket_capacity_max_balls >= bucket_capacity_min_balls,
          "bucket capacity range invalid");
  require(release_prob_per_20deg > 0.0 && release_prob_per_20deg <= 1.0,
          "release_prob_per_20deg not in (0,1]");
}

FoodKind pile_kind(const PileModel& pile) {
  return std::holds_alternative<SpaghettiPileModel>(pile) ? FoodKind::LongEntangled
                                                          : FoodKind::GranularSlippery;
}

double pile_mass_g(const PileModel& pile) {
  return std::visit([](const auto& p) { return p.mass_g(); }, pile);
}

PileModel pile_at_trial(const PileModel& pile, int trial_index) {
  if (const auto* s = std::get_if<SpaghettiPileModel>(&pile)) return s->at_trial(trial_index);
  return pile;
}

double mean_unit_mass_g(const PileModel& pile) {
  if (const auto* s = std::get_if<SpaghettiPileModel>(&pile)) return s->mean_strand_weight_g();
  return std::get<GranularPileModel>(pile).ball_weight_g_mean;
}

double payload_factor(ScoopProfile profile) {
  switch (profile) {
    case ScoopProfile::Circular: return 1.0;
    case ScoopProfile::Elliptical: return 1.1;
    case ScoopProfile::Conical: return 0.66;
  }
  return 1.0;
}

double relative_ease(ScoopProfile profile) {
  // Measured ease-of-drop scores, normalised to the circular scoop.
  switch (profile) {
    case ScoopProfile::Circular: return 1.0;
    case ScoopProfile::Elliptical: return 3.3 / 4.3;
    case ScoopProfile::Conical: return 3.62 / 4.3;
  }
  return 1.0;
}

double nominal_drop_angle_deg(ScoopProfile profile) {
  switch (profile) {
    case ScoopProfile::Circular: return 103.0;
    case ScoopProfile::Elliptical: return 122.0;
    case ScoopProfile::Conical: return 115.0;
  }
  return 103.0;
}

TransitRates transit_rates(double bit_density_per_cm2) {
  return {interpolate(bit_density_per_cm2, &RateKnot::accidental),
          interpolate(bit_density_per_cm2, &RateKnot::damaged)};
}

// ---------------------------------------------------------------------------
// HeldLoad

HeldLoad HeldLoad::from_strands(const BeltAssemblySpec& belt,
                                std::vector<StrandCompartment> compartments,
                                std::vector<Edge> edges, double stickiness) {
  belt.validate();
  if (belt.food_kind == FoodKind::GranularSlippery)
    throw Error(ErrorCode::KindMismatch, "strand load on a bucket belt");
  HeldLoad load;
  load.food_kind_ = FoodKind::LongEntangled;
  load.plain_belt_ = belt.food_kind == FoodKind::PlainBelt;
  load.bit_density_ = belt.bit_density_per_cm2;
  load.compartment_count_ = belt.compartment_count;
  load.stickiness_ = std::clamp(stickiness, 0.0, 1.0);
  for (auto& c : compartments) load.compartments_.emplace_back(std::move(c));
  load.edges_ = std::move(edges);
  load.index_strands();
  load.total_mass_g_ = load.recompute_mass();
  return load;
}

HeldLoad HeldLoad::from_buckets(const BeltAssemblySpec& belt, std::vector<Bucket> buckets,
                                double release_prob_per_20deg) {
  belt.validate();
  if (belt.food_kind == FoodKind::LongEntangled)
    throw Error(ErrorCode::KindMismatch, "bucket load on a spoke belt");
  HeldLoad load;
  load.food_kind_ = FoodKind::GranularSlippery;
  load.plain_belt_ = belt.food_kind == FoodKind::PlainBelt;
  load.compartment_count_ = belt.compartment_count;
  load.release_prob_per_20deg_ = std::clamp(release_prob_per_20deg, 0.0, 1.0);
  for (auto& b : buckets) load.compartments_.emplace_back(std::move(b));
  load.total_mass_g_ = load.recompute_mass();
  return load;
}

void HeldLoad::index_strands() {
  std::uint32_t max_id = 0;
  bool any = false;
  for (const auto& c : compartments_) {
    for (const auto& s : std::get<StrandCompartment>(c).strands) {
      max_id = std::max(max_id, s.id);
      any = true;
    }
  }
  strand_slot_.assign(any ? max_id + 1 : 0, -1);
  adjacency_.assign(strand_slot_.size(), {});
  for (std::size_t i = 0; i < compartments_.size(); ++i) {
    for (const auto& s : std::get<StrandCompartment>(compartments_[i]).strands) {
      if (strand_slot_[s.id] != -1) throw Error(ErrorCode::InvalidArgument, "duplicate strand id");
      strand_slot_[s.id] = popped_ + static_cast<long>(i);
    }
  }
  for (const auto& [a, b] : edges_) {
    if (a >= strand_slot_.size() || b >= strand_slot_.size() || a == b)
      throw Error(ErrorCode::InvalidArgument, "entanglement edge refers to unknown strand");
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
}

double HeldLoad::recompute_mass() const {
  double total = 0.0;
  for (const auto& c : compartments_) total += sum_compartment(c);
  for (const auto& b : passed_) total += sum_compartment(b);
  return total;
}

double HeldLoad::releasable_mass_g() const {
  double total = 0.0;
  for (const auto& c : compartments_) total += sum_compartment(c);
  return total;
}

std::size_t HeldLoad::held_strand_count() const {
  std::size_t n = 0;
  for (const auto& c : compartments_)
    if (const auto* sc = std::get_if<StrandCompartment>(&c)) n += sc->strands.size();
  return n;
}

int HeldLoad::remaining_in_bits() const {
  std::size_t n = 0;
  for (const auto& b : passed_) n += b.balls_g.size();
  return static_cast<int>(n);
}

void HeldLoad::check_invariants() const {
  const double recomputed = recompute_mass();
  if (std::abs(recomputed - total_mass_g_) > kMassTolerance)
    throw std::logic_error("HeldLoad mass mismatch: tracked " + std::to_string(total_mass_g_) +
                           " vs contents " + std::to_string(recomputed));
  if (total_mass_g_ < -kMassTolerance) throw std::logic_error("HeldLoad mass negative");
}

void HeldLoad::remove_strand(std::uint32_t id) {
  const long slot = strand_slot_[id];
  auto& strands = std::get<StrandCompartment>(compartments_[slot - popped_]).strands;
  std::erase_if(strands, [id](const Strand& s) { return s.id == id; });
  strand_slot_[id] = -1;
}

double HeldLoad::release_strands(double step_deg, Rng& rng) {
  const double pitch = 360.0 / compartment_count_;
  const double before = belt_angle_deg_;
  belt_angle_deg_ += step_deg;
  const long crossings = static_cast<long>(std::floor(belt_angle_deg_ / pitch + 1e-9)) -
                         static_cast<long>(std::floor(before / pitch + 1e-9));

  std::vector<Strand> released;
  for (long k = 0; k < crossings && !compartments_.empty(); ++k) {
    for (const auto& s : std::get<StrandCompartment>(compartments_.front()).strands) {
      released.push_back(s);
      strand_slot_[s.id] = -1;
    }
    compartments_.pop_front();
    ++popped_;
  }

  // Entangled partners elsewhere on the belt get dragged along.
  for (std::size_t i = 0; i < released.size(); ++i) {
    for (std::uint32_t nb : adjacency_[released[i].id]) {
      if (strand_slot_[nb] == -1) continue;
      if (!rng.bernoulli(stickiness_)) continue;
      const auto& strands =
          std::get<StrandCompartment>(compartments_[strand_slot_[nb] - popped_]).strands;
      const auto it = std::find_if(strands.begin(), strands.end(),
                                   [nb](const Strand& s) { return s.id == nb; });
      released.push_back(*it);
      remove_strand(nb);
    }
  }

  double dropped = 0.0;
  for (const auto& s : released) dropped += s.weight_g;
  return dropped;
}

double HeldLoad::release_balls(double step_deg, Rng& rng) {
  if (compartments_.empty()) return 0.0;
  auto& bucket = std::get<Bucket>(compartments_.front());
  bucket.tilt_deg += step_deg;
  const double p = 1.0 - std::pow(1.0 - release_prob_per_20deg_, step_deg / 20.0);

  double dropped = 0.0;
  std::vector<double> kept;
  kept.reserve(bucket.balls_g.size());
  for (double ball : bucket.balls_g) {
    if (rng.bernoulli(p)) {
      dropped += ball;
    } else {
      kept.push_back(ball);
    }
  }
  bucket.balls_g = std::move(kept);

  if (!bucket.balls_g.empty() && bucket.tilt_deg >= 180.0) {
    passed_.push_back(std::move(bucket));
    compartments_.pop_front();
  }
  while (!compartments_.empty() && std::get<Bucket>(compartments_.front()).balls_g.empty())
    compartments_.pop_front();
  return dropped;
}

// ---------------------------------------------------------------------------
// Operations

HeldLoad pickup(const PileModel& pile, const BeltAssemblySpec& belt, Rng& rng) {
  belt.validate();
  const FoodKind kind = pile_kind(pile);
  if (belt.food_kind != FoodKind::PlainBelt && belt.food_kind != kind)
    throw Error(ErrorCode::KindMismatch, std::string("belt for ") +
                                             std::string(to_string(belt.food_kind)) +
                                             " cannot pick " + std::string(to_string(kind)));
  if (pile_mass_g(pile) <= 0.0) throw Error(ErrorCode::EmptyPile, "pile holds no food");

  HeldLoad load;
  load.plain_belt_ = belt.food_kind == FoodKind::PlainBelt;
  load.bit_density_ = belt.bit_density_per_cm2;
  load.compartment_count_ = belt.compartment_count;

  if (const auto* sp = std::get_if<SpaghettiPileModel>(&pile)) {
    sp->validate();
    load.food_kind_ = FoodKind::LongEntangled;
    load.stickiness_ = sp->stickiness;
    std::vector<Strand> strands;

    if (load.plain_belt_) {
      // Three loosely held strands forming one clump.
      const double clump = rng.uniform(sp->plain_pickup_min_g, sp->plain_pickup_max_g);
      const double a = rng.uniform(-0.15, 0.15);
      const double b = rng.uniform(-0.15, 0.15);
      const std::array<double, 3> jitter{a, b, -a - b};
      for (std::uint32_t i = 0; i < 3 && static_cast<int>(i) < sp->total_strands; ++i)
        strands.push_back({i, clump / 3.0 + jitter[i]});
      load.compartments_.emplace_back(StrandCompartment{std::move(strands)});
      load.compartment_count_ = 1;
    } else {
      const double capacity =
          std::min(sp->pickup_capacity_g * (1.0 + rng.uniform(-sp->capacity_noise, sp->capacity_noise)),
                   sp->mass_g());
      double held = 0.0;
      for (int i = 0; i < sp->total_strands; ++i) {
        const double w = rng.uniform(sp->strand_weight_min_g, sp->strand_weight_max_g);
        if (held + w > capacity) break;
        strands.push_back({static_cast<std::uint32_t>(i), w});
        held += w;
      }
      // Spread round-robin over the compartments, in shuffled order.
      const int n_comp = belt.compartment_count;
      std::vector<int> slot(strands.size());
      for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = static_cast<int>(i % n_comp);
      std::shuffle(slot.begin(), slot.end(), rng.engine());
      std::vector<StrandCompartment> comps(n_comp);
      for (std::size_t i = 0; i < strands.size(); ++i) comps[slot[i]].strands.push_back(strands[i]);
      for (auto& c : comps) load.compartments_.emplace_back(std::move(c));

      for (std::size_t i = 0; i < strands.size(); ++i)
        for (std::size_t j = i + 1; j < strands.size(); ++j)
          if (rng.bernoulli(sp->entanglement_prob)) load.edges_.emplace_back(strands[i].id, strands[j].id);
    }
    load.index_strands();
  } else {
    const auto& gp = std::get<GranularPileModel>(pile);
    gp.validate();
    load.food_kind_ = FoodKind::GranularSlippery;
    const double factor = payload_factor(belt.scoop_profile);
    load.release_prob_per_20deg_ =
        std::clamp(gp.release_prob_per_20deg * relative_ease(belt.scoop_profile), 0.0, 1.0);
    // A bare belt cannot hold slippery balls at all.
    if (!load.plain_belt_) {
      int available = gp.total_balls;
      for (int c = 0; c < belt.compartment_count; ++c) {
        Bucket bucket;
        const int scooped = static_cast<int>(
            std::lround(rng.uniform_int(gp.bucket_capacity_min_balls, gp.bucket_capacity_max_balls) * factor));
        for (int k = 0; k < scooped && available > 0; ++k) {
          if (rng.bernoulli(gp.slip_prob)) continue;
          const double w = rng.truncated_normal(gp.ball_weight_g_mean, gp.ball_weight_g_sd);
          bucket.balls_g.push_back(std::max(w, 0.05 * gp.ball_weight_g_mean));
          --available;
        }
        load.compartments_.emplace_back(std::move(bucket));
      }
    }
  }

  load.total_mass_g_ = load.recompute_mass();
  load.check_invariants();
  return load;
}

double release_step(HeldLoad& load, double step_deg, Rng& rng) {
  if (!(step_deg > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_deg must be > 0");
  if (load.empty()) return 0.0;
  if (load.plain_belt_) return dump_all(load);

  const double dropped = load.food_kind_ == FoodKind::GranularSlippery
                             ? load.release_balls(step_deg, rng)
                             : load.release_strands(step_deg, rng);
  load.total_mass_g_ -= dropped;
  load.released_mass_g_ += dropped;
  if (load.compartments_.empty() && load.passed_.empty()) load.total_mass_g_ = 0.0;
  load.check_invariants();
  return dropped;
}

double dump_all(HeldLoad& load) {
  const double dropped = load.recompute_mass();
  load.compartments_.clear();
  load.passed_.clear();
  std::fill(load.strand_slot_.begin(), load.strand_slot_.end(), -1);
  load.total_mass_g_ = 0.0;
  load.released_mass_g_ += dropped;
  return dropped;
}

void transit_effects(HeldLoad& load, Rng& rng) {
  if (load.food_kind_ != FoodKind::LongEntangled)
    throw Error(ErrorCode::KindMismatch, "transit effects are modelled for strand loads only");
  const TransitRates rates = transit_rates(load.bit_density_);

  std::vector<std::uint32_t> held;
  for (std::uint32_t id = 0; id < load.strand_slot_.size(); ++id)
    if (load.strand_slot_[id] != -1) held.push_back(id);

  const int lost = std::min<int>(rng.poisson(rates.accidental_strands), static_cast<int>(held.size()));
  for (int k = 0; k < lost; ++k) {
    const std::size_t pick = rng.index(held.size());
    const std::uint32_t id = held[pick];
    held.erase(held.begin() + static_cast<long>(pick));
    const auto& strands =
        std::get<StrandCompartment>(load.compartments_[load.strand_slot_[id] - load.popped_]).strands;
    const double w = std::find_if(strands.begin(), strands.end(),
                                  [id](const Strand& s) { return s.id == id; })->weight_g;
    load.remove_strand(id);
    load.total_mass_g_ -= w;
    load.transit_lost_mass_g_ += w;
    ++load.transit_loss_tally_;
  }

  const int total_strands = static_cast<int>(held.size()) + lost;
  load.damage_tally_ += std::min(rng.poisson(rates.damaged_strands), total_strands);
  load.check_invariants();
}

}  // namespace bitgrip::food
