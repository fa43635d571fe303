#include "bitgrip/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "bitgrip/error.hpp"
#include "bitgrip/format.hpp"

namespace bitgrip::control {

TrialRecord run_trial(const ExperimentSetup& setup, double target_g, int class_index, int trial,
                      std::uint64_t seed) {
  TrialRecord rec;
  rec.food = setup.food_name;
  rec.target_g = target_g;
  rec.trial = trial;
  const auto ci = static_cast<std::uint64_t>(class_index);
  const auto ti = static_cast<std::uint64_t>(trial);
  try {
    Rng food_rng = Rng::derive(seed, {ci, ti, 0});
    const food::PileModel pile = food::pile_at_trial(setup.pile, trial);
    food::HeldLoad load = food::pickup(pile, setup.belt, food_rng);
    rec.pickup_mass_g = load.total_mass_g();
    if (load.food_kind() == food::FoodKind::LongEntangled) food::transit_effects(load, food_rng);

    scale::SimulatedScale scale(setup.scale, Rng::derive(seed, {ci, ti, 1}));
    scale.tare();
    const DropResult r = drop_to_target(target_g, load, scale, setup.controller, food_rng);
    rec.dropped_g = r.dropped_g;
    rec.steps = r.steps_used;
    rec.terminated_by = std::string(to_string(r.terminated_by));
    rec.true_dropped_g = r.true_dropped_g;
    rec.transit_lost_g = load.transit_lost_mass_g();
    rec.remaining_g = load.total_mass_g();
  } catch (const Error& e) {
    rec.terminated_by = "Error";
    rec.error = e.what();
  }
  return rec;
}

ClassSummary summarize_class(double target_g, std::span<const TrialRecord> trials) {
  ClassSummary s;
  s.target_g = target_g;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> dropped;
  for (const auto& t : trials) {
    if (t.error) {
      ++s.failures;
    } else {
      dropped.push_back(t.dropped_g);
    }
  }
  if (dropped.empty()) return s;
  const double n = static_cast<double>(dropped.size());
  s.mean_dropped_g = std::accumulate(dropped.begin(), dropped.end(), 0.0) / n;
  s.accuracy_pct = accuracy_pct(target_g, s.mean_dropped_g);
  if (dropped.size() > 1) {
    double ss = 0.0;
    for (double d : dropped) ss += (d - s.mean_dropped_g) * (d - s.mean_dropped_g);
    s.sd_g = std::sqrt(ss / (n - 1.0));
  }
  double acc = 0.0;
  for (double d : dropped) acc += accuracy_pct(target_g, d);
  s.mean_trial_accuracy_pct = acc / n;
  return s;
}

ExperimentReport run_weight_class_experiment(const ExperimentSetup& setup,
                                             std::span<const double> targets, int trials_per_class,
                                             std::uint64_t seed, int parallel_trials) {
  if (trials_per_class < 1) throw Error(ErrorCode::InvalidArgument, "trials_per_class must be >= 1");
  for (double t : targets)
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidTarget, "targets must be > 0 g");
  setup.belt.validate();
  setup.scale.validate();
  setup.controller.validate();

  ExperimentReport report;
  report.food = setup.food_name;
  report.mode = setup.controller.mode;
  report.seed = seed;

  const std::size_t per_class = static_cast<std::size_t>(trials_per_class);
  const std::size_t total = targets.size() * per_class;
  report.trials.resize(total);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < total; i += stride) {
      const auto c = static_cast<int>(i / per_class);
      const auto t = static_cast<int>(i % per_class);
      report.trials[i] = run_trial(setup, targets[c], c, t, seed);
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, parallel_trials));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  for (std::size_t c = 0; c < targets.size(); ++c) {
    report.classes.push_back(summarize_class(
        targets[c], std::span<const TrialRecord>(report.trials).subspan(c * per_class, per_class)));
  }
  return report;
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "food,target_g,trial,dropped_g,steps,terminated_by\n";
  for (const auto& t : report.trials) {
    out << t.food << ',' << fmt_num(t.target_g) << ',' << t.trial << ',' << fmt_num(t.dropped_g) << ','
        << t.steps << ',' << t.terminated_by << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(const ExperimentReport& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : report.classes) {
    classes.push_back({{"target_g", c.target_g},
                       {"trials", c.trials},
                       {"failures", c.failures},
                       {"mean_dropped_g", round_to(c.mean_dropped_g, 6)},
                       {"accuracy_pct", round_to(c.accuracy_pct, 6)},
                       {"sd_g", round_to(c.sd_g, 6)},
                       {"mean_trial_accuracy_pct", round_to(c.mean_trial_accuracy_pct, 6)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"food", report.food},
          {"mode", std::string(to_string(report.mode))},
          {"seed", report.seed},
          {"classes", classes}};
}

std::string to_text(const ExperimentReport& report) {
  std::ostringstream out;
  out << "food: " << report.food << "  mode: " << to_string(report.mode) << "  seed: " << report.seed << '\n';
  out << "target_g  mean_dropped_g  accuracy_pct  sd_g    trials  failures\n";
  for (const auto& c : report.classes) {
    char line[128];
    std::snprintf(line, sizeof line, "%8.1f  %14.3f  %12.1f  %6.2f  %6d  %8d\n", c.target_g,
                  c.mean_dropped_g, c.accuracy_pct, c.sd_g, c.trials, c.failures);
    out << line;
  }
  return out.str();
}

}  // namespace bitgrip::control
