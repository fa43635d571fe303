#include "bitgrip/bit_eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "bitgrip/error.hpp"
#include "bitgrip/format.hpp"

namespace bitgrip::biteval {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

double parse_number(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "row " + std::to_string(row) + ": '" + s + "' is not a number");
  }
}

// Reads a header plus rows, checking the leading columns by name.
std::vector<std::vector<std::string>> read_rows(std::istream& in, std::span<const std::string_view> columns) {
  std::string line;
  bool have_header = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_row(line);
    if (!have_header) {
      if (cells.size() < columns.size())
        throw Error(ErrorCode::ConfigError, "CSV header has too few columns");
      for (std::size_t i = 0; i < columns.size(); ++i)
        if (cells[i] != columns[i])
          throw Error(ErrorCode::ConfigError,
                      "CSV header column " + std::to_string(i) + " must be '" + std::string(columns[i]) + "'");
      have_header = true;
      continue;
    }
    if (cells.size() < columns.size())
      throw Error(ErrorCode::ConfigError, "CSV row " + std::to_string(rows.size() + 1) + " is short");
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no trial rows");
  return rows;
}

template <class Trial, class Score, class TieKey>
std::vector<Ranked<Trial>> rank(std::span<const Trial> trials, Score score, TieKey tie) {
  if (trials.empty()) throw Error(ErrorCode::EmptyInput, "nothing to rank");
  std::vector<Ranked<Trial>> out;
  out.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) out.push_back({trials[i], score(trials[i]), i});
  std::stable_sort(out.begin(), out.end(), [&](const Ranked<Trial>& a, const Ranked<Trial>& b) {
    if (a.score != b.score) return a.score > b.score;
    return tie(a.trial) < tie(b.trial);
  });
  return out;
}

}  // namespace

void ScoreWeights::validate() const {
  if (!std::isfinite(w1) || !std::isfinite(w2) || !std::isfinite(w3))
    throw Error(ErrorCode::InvalidArgument, "score weights must be finite");
}

std::string_view to_string(DensityClass c) {
  switch (c) {
    case DensityClass::High: return "High";
    case DensityClass::Med: return "Med";
    case DensityClass::Low: return "Low";
  }
  return "?";
}

DensityClass density_class_from_string(std::string_view s) {
  if (s == "High") return DensityClass::High;
  if (s == "Med" || s == "Medium") return DensityClass::Med;
  if (s == "Low") return DensityClass::Low;
  throw Error(ErrorCode::InvalidArgument, "unknown density class '" + std::string(s) + "'");
}

double nominal_density(DensityClass c) {
  switch (c) {
    case DensityClass::High: return 2.0;
    case DensityClass::Med: return 1.5;
    case DensityClass::Low: return 1.0;
  }
  return 1.0;
}

DensityClass classify_density(double bits_per_cm2) {
  if (bits_per_cm2 >= 1.75) return DensityClass::High;
  if (bits_per_cm2 >= 1.25) return DensityClass::Med;
  return DensityClass::Low;
}

void SpaghettiTrial::validate() const {
  if (gripper_width_mm < 0 || density_per_cm2 < 0 || dropped_weight_g < 0 || accidental_drops < 0 ||
      damaged_strands < 0)
    throw Error(ErrorCode::InvalidArgument, "spaghetti trial measurements must be >= 0");
}

std::string SpaghettiTrial::label() const {
  return fmt_num(gripper_width_mm) + "mm/" + std::string(to_string(density_class));
}

void IkuraTrial::validate() const {
  if (dropped_weight_g < 0 || remaining_in_bit < 0 || ease_of_drop < 0)
    throw Error(ErrorCode::InvalidArgument, "ikura trial measurements must be >= 0");
  if (!(drop_angle_deg > 0.0 && drop_angle_deg < 180.0))
    throw Error(ErrorCode::InvalidArgument, "drop_angle_deg must be in (0, 180)");
}

std::string IkuraTrial::label() const { return std::string(food::to_string(scoop_profile)); }

double score_spaghetti(const SpaghettiTrial& t, const ScoreWeights& w) {
  return w.w1 * t.dropped_weight_g - w.w2 * t.accidental_drops - w.w3 * t.damaged_strands;
}

double score_ikura(const IkuraTrial& t, const ScoreWeights& w) {
  return w.w1 * t.dropped_weight_g - w.w2 * t.remaining_in_bit + w.w3 * t.ease_of_drop;
}

double ease_from_drop_angle(double drop_angle_deg) { return 5.0 * (180.0 - drop_angle_deg) / 90.0; }

std::vector<Ranked<SpaghettiTrial>> rank_configs(std::span<const SpaghettiTrial> trials,
                                                 const ScoreWeights& w) {
  return rank(trials, [&](const SpaghettiTrial& t) { return score_spaghetti(t, w); },
              [](const SpaghettiTrial& t) { return t.damaged_strands; });
}

std::vector<Ranked<IkuraTrial>> rank_configs(std::span<const IkuraTrial> trials, const ScoreWeights& w) {
  return rank(trials, [&](const IkuraTrial& t) { return score_ikura(t, w); },
              [](const IkuraTrial& t) { return t.remaining_in_bit; });
}

std::vector<SpaghettiTrial> spaghetti_reference_trials() {
  using enum DensityClass;
  return {
      {20, High, 2.0, 42.0, 1.0, 4.8},
      {30, High, 2.0, 39.3, 0.5, 5.83},
      {40, High, 2.0, 45.2, 0.6, 6.8},
      {30, Med, 1.5, 41.0, 0.14, 2.28},
      {30, Low, 1.0, 48.42, 0.8, 0.14},
  };
}

std::vector<double> spaghetti_reference_scores() { return {31.4, 27.14, 31.0, 36.3, 47.34}; }

std::vector<IkuraTrial> ikura_reference_trials() {
  using food::ScoopProfile;
  return {
      {ScoopProfile::Conical, 7.401, 2.6, 3.62, 115.0},
      {ScoopProfile::Elliptical, 12.28, 5.8, 3.3, 122.0},
      {ScoopProfile::Circular, 11.206, 3.5, 4.3, 103.0},
  };
}

std::vector<double> ikura_reference_scores() { return {9.7, 12.68, 13.756}; }

std::vector<food::BeltAssemblySpec> spaghetti_reference_grid() {
  using food::BeltAssemblySpec;
  return {BeltAssemblySpec::spaghetti(20, 2.0), BeltAssemblySpec::spaghetti(30, 2.0),
          BeltAssemblySpec::spaghetti(40, 2.0), BeltAssemblySpec::spaghetti(30, 1.5),
          BeltAssemblySpec::spaghetti(30, 1.0)};
}

std::vector<food::BeltAssemblySpec> ikura_reference_grid() {
  using food::BeltAssemblySpec;
  using food::ScoopProfile;
  return {BeltAssemblySpec::ikura(ScoopProfile::Conical), BeltAssemblySpec::ikura(ScoopProfile::Elliptical),
          BeltAssemblySpec::ikura(ScoopProfile::Circular)};
}

std::vector<SpaghettiSweepRow> sweep_spaghetti(std::span<const food::BeltAssemblySpec> grid,
                                               const food::SpaghettiPileModel& pile,
                                               const SweepOptions& opts, const ScoreWeights& w) {
  if (opts.trials < 1) throw Error(ErrorCode::InvalidArgument, "sweep trials must be >= 1");
  std::vector<SpaghettiSweepRow> rows;
  for (const auto& cfg : grid) {
    if (cfg.food_kind == food::FoodKind::GranularSlippery)
      throw Error(ErrorCode::KindMismatch, "spaghetti sweep given a bucket belt");
    SpaghettiSweepRow row;
    row.config = cfg;
    row.means.gripper_width_mm = cfg.gripper_width_mm;
    row.means.density_per_cm2 = cfg.bit_density_per_cm2;
    row.means.density_class = classify_density(cfg.bit_density_per_cm2);
    for (int t = 0; t < opts.trials; ++t) {
      Rng rng = Rng::derive(opts.seed, {static_cast<std::uint64_t>(t), 0x5eed});
      auto load = food::pickup(pile.at_trial(t), cfg, rng);
      food::transit_effects(load, rng);
      double dropped = 0.0;
      for (int s = 0; s < opts.release_steps; ++s) dropped += food::release_step(load, opts.step_deg, rng);
      row.means.dropped_weight_g += dropped;
      row.means.accidental_drops += load.transit_loss_tally();
      row.means.damaged_strands += load.damage_tally();
    }
    row.means.dropped_weight_g /= opts.trials;
    row.means.accidental_drops /= opts.trials;
    row.means.damaged_strands /= opts.trials;
    row.score = score_spaghetti(row.means, w);
    rows.push_back(row);
  }
  return rows;
}

std::vector<IkuraSweepRow> sweep_ikura(std::span<const food::BeltAssemblySpec> grid,
                                       const food::GranularPileModel& pile, const SweepOptions& opts,
                                       const ScoreWeights& w) {
  if (opts.trials < 1) throw Error(ErrorCode::InvalidArgument, "sweep trials must be >= 1");
  std::vector<IkuraSweepRow> rows;
  for (const auto& cfg : grid) {
    if (cfg.food_kind == food::FoodKind::LongEntangled)
      throw Error(ErrorCode::KindMismatch, "ikura sweep given a spoke belt");
    IkuraSweepRow row;
    row.config = cfg;
    row.means.scoop_profile = cfg.scoop_profile;
    row.means.drop_angle_deg = food::nominal_drop_angle_deg(cfg.scoop_profile);
    row.means.ease_of_drop = ease_from_drop_angle(row.means.drop_angle_deg);
    for (int t = 0; t < opts.trials; ++t) {
      Rng rng = Rng::derive(opts.seed, {static_cast<std::uint64_t>(t), 0x5eed});
      auto load = food::pickup(pile, cfg, rng);
      double dropped = 0.0;
      for (int s = 0; s < opts.release_steps; ++s) dropped += food::release_step(load, opts.step_deg, rng);
      // Stuck balls: buckets already tipped past the release point, plus
      // whatever the currently tipped bucket still holds.
      double remaining = load.remaining_in_bits();
      if (!load.compartments().empty()) {
        const auto& front = std::get<food::Bucket>(load.compartments().front());
        if (front.tilt_deg > 0.0) remaining += static_cast<double>(front.balls_g.size());
      }
      row.means.dropped_weight_g += dropped;
      row.means.remaining_in_bit += remaining;
    }
    row.means.dropped_weight_g /= opts.trials;
    row.means.remaining_in_bit /= opts.trials;
    row.score = score_ikura(row.means, w);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SpaghettiTrial> read_spaghetti_csv(std::istream& in) {
  static constexpr std::string_view cols[] = {"gripper_width_mm", "bit_density", "dropped_weight_g",
                                              "accidental_drops", "damaged_strands"};
  std::vector<SpaghettiTrial> out;
  std::size_t row = 0;
  for (const auto& cells : read_rows(in, cols)) {
    ++row;
    SpaghettiTrial t;
    t.gripper_width_mm = parse_number(cells[0], row);
    const auto& dens = cells[1];
    if (!dens.empty() && (std::isdigit(static_cast<unsigned char>(dens[0])) || dens[0] == '.')) {
      t.density_per_cm2 = parse_number(dens, row);
      t.density_class = classify_density(t.density_per_cm2);
    } else {
      t.density_class = density_class_from_string(dens);
      t.density_per_cm2 = nominal_density(t.density_class);
    }
    t.dropped_weight_g = parse_number(cells[2], row);
    t.accidental_drops = parse_number(cells[3], row);
    t.damaged_strands = parse_number(cells[4], row);
    t.validate();
    out.push_back(t);
  }
  return out;
}

std::vector<IkuraTrial> read_ikura_csv(std::istream& in) {
  static constexpr std::string_view cols[] = {"scoop_profile", "dropped_weight_g", "remaining_in_bit",
                                              "ease_of_drop", "drop_angle_deg"};
  std::vector<IkuraTrial> out;
  std::size_t row = 0;
  for (const auto& cells : read_rows(in, cols)) {
    ++row;
    IkuraTrial t;
    t.scoop_profile = food::scoop_profile_from_string(cells[0]);
    t.dropped_weight_g = parse_number(cells[1], row);
    t.remaining_in_bit = parse_number(cells[2], row);
    t.ease_of_drop = parse_number(cells[3], row);
    t.drop_angle_deg = parse_number(cells[4], row);
    t.validate();
    out.push_back(t);
  }
  return out;
}

std::string ranked_csv(std::span<const Ranked<SpaghettiTrial>> ranked) {
  std::ostringstream out;
  out << "rank,gripper_width_mm,bit_density,dropped_weight_g,accidental_drops,damaged_strands,"
         "performance_score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& t = ranked[i].trial;
    out << i + 1 << ',' << fmt_num(t.gripper_width_mm) << ',' << to_string(t.density_class) << ','
        << fmt_num(t.dropped_weight_g) << ',' << fmt_num(t.accidental_drops) << ','
        << fmt_num(t.damaged_strands) << ',' << fmt_num(ranked[i].score) << '\n';
  }
  return out.str();
}

std::string ranked_csv(std::span<const Ranked<IkuraTrial>> ranked) {
  std::ostringstream out;
  out << "rank,scoop_profile,dropped_weight_g,remaining_in_bit,ease_of_drop,drop_angle_deg,"
         "performance_score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& t = ranked[i].trial;
    out << i + 1 << ',' << food::to_string(t.scoop_profile) << ',' << fmt_num(t.dropped_weight_g) << ','
        << fmt_num(t.remaining_in_bit) << ',' << fmt_num(t.ease_of_drop) << ','
        << fmt_num(t.drop_angle_deg) << ',' << fmt_num(ranked[i].score) << '\n';
  }
  return out.str();
}

}  // namespace bitgrip::biteval
