#include "bitgrip/orchestrator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bitgrip/error.hpp"
#include "bitgrip/format.hpp"

namespace bitgrip::cell {

void PackagingOrder::validate() const {
  if (boxes.empty()) throw Error(ErrorCode::InvalidArgument, "order has no boxes");
  std::set<std::string> ids;
  for (const auto& b : boxes) {
    if (b.box_id.empty()) throw Error(ErrorCode::InvalidArgument, "box id must not be empty");
    if (!ids.insert(b.box_id).second) throw Error(ErrorCode::InvalidArgument, "duplicate box id '" + b.box_id + "'");
    for (const auto& s : b.servings) {
      if (s.food.empty()) throw Error(ErrorCode::InvalidArgument, "serving in box '" + b.box_id + "' has no food");
      if (!(s.target_g > 0.0))
        throw Error(ErrorCode::InvalidTarget, "serving targets must be > 0 g (box '" + b.box_id + "')");
    }
  }
}

PackagingOrder PackagingOrder::two_box_demo() {
  return {{
      {"box1", {{"spaghetti", 50.0}, {"ikura", 5.0}}},
      {"box2", {{"spaghetti", 10.0}, {"ikura", 20.0}}},
  }};
}

int Plan::tool_changes() const {
  return static_cast<int>(std::count_if(actions.begin(), actions.end(),
                                        [](const Action& a) { return a.kind == ActionKind::ToolChange; }));
}

int Plan::servings() const { return static_cast<int>(actions.size()) - tool_changes(); }

int Plan::boxes() const {
  std::set<std::string> ids;
  for (const auto& a : actions)
    if (a.kind == ActionKind::Serve) ids.insert(a.box_id);
  return static_cast<int>(ids.size());
}

double estimate_time(const Plan& plan, const CellTiming& timing) {
  return plan.boxes() * timing.per_box_s + plan.tool_changes() * timing.per_change_s;
}

FoodStation FoodStation::make(food::PileModel pile, food::BeltAssemblySpec belt, const scale::ScaleConfig& scale) {
  auto controller = control::ControllerConfig::defaults_for(pile, belt, scale);
  return {std::move(pile), belt, controller};
}

void CellSetup::validate() const {
  if (!mounted.empty() && !foods.contains(mounted))
    throw Error(ErrorCode::UnknownFood, "mounted food '" + mounted + "' has no belt assembly");
  for (const auto& [name, st] : foods) {
    st.belt.validate();
    st.controller.validate();
    std::visit([](const auto& p) { p.validate(); }, st.pile);
    const bool granular_pile = food::pile_kind(st.pile) == food::FoodKind::GranularSlippery;
    if (st.belt.food_kind != food::FoodKind::PlainBelt &&
        granular_pile != (st.belt.food_kind == food::FoodKind::GranularSlippery))
      throw Error(ErrorCode::KindMismatch, "belt for '" + name + "' does not fit its pile");
  }
  scale.validate();
  changer.validate();
  if (timing.per_box_s < 0 || timing.per_change_s < 0)
    throw Error(ErrorCode::InvalidArgument, "cell timing must be >= 0");
}

CellSetup CellSetup::standard() {
  CellSetup c;
  c.foods.emplace("spaghetti", FoodStation::make(food::SpaghettiPileModel{},
                                                 food::BeltAssemblySpec::spaghetti(30.0, 1.0), c.scale));
  c.foods.emplace("ikura", FoodStation::make(food::GranularPileModel{},
                                             food::BeltAssemblySpec::ikura(food::ScoopProfile::Circular), c.scale));
  c.mounted = "spaghetti";
  return c;
}

Plan plan(const PackagingOrder& order, const CellSetup& cell) {
  order.validate();
  std::vector<std::string> foods;
  for (const auto& b : order.boxes) {
    for (const auto& s : b.servings) {
      if (!cell.foods.contains(s.food)) throw Error(ErrorCode::UnknownFood, "no belt assembly for '" + s.food + "'");
      if (std::find(foods.begin(), foods.end(), s.food) == foods.end()) foods.push_back(s.food);
    }
  }
  if (const auto it = std::find(foods.begin(), foods.end(), cell.mounted); it != foods.end())
    std::rotate(foods.begin(), it, it + 1);

  Plan p;
  std::string current = cell.mounted;
  for (const auto& f : foods) {
    if (f != current) p.actions.push_back(Action::change_to(f));
    current = f;
    for (const auto& b : order.boxes)
      for (const auto& s : b.servings)
        if (s.food == f) p.actions.push_back(Action::serve(b.box_id, f, s.target_g));
  }
  p.estimated_time_s = estimate_time(p, cell.timing);
  return p;
}

int brute_force_min_changes(const PackagingOrder& order, const std::string& mounted) {
  std::vector<std::string> seq;
  for (const auto& b : order.boxes)
    for (const auto& s : b.servings) seq.push_back(s.food);
  std::sort(seq.begin(), seq.end());
  int best = static_cast<int>(seq.size()) + 1;
  do {
    int changes = 0;
    const std::string* prev = &mounted;
    for (const auto& f : seq) {
      if (f != *prev) ++changes;
      prev = &f;
    }
    best = std::min(best, changes);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return seq.empty() ? 0 : best;
}

namespace {

toolchange::DockId dock_of(const std::string& food) { return {"dock_" + food}; }
toolchange::AssemblyId assembly_of(const std::string& food) { return {"belt_" + food}; }

toolchange::ToolChangeState initial_changer(const CellSetup& cell) {
  std::map<toolchange::DockId, std::optional<toolchange::AssemblyId>> docks;
  for (const auto& [name, st] : cell.foods) {
    if (name == cell.mounted)
      docks.emplace(dock_of(name), std::nullopt);
    else
      docks.emplace(dock_of(name), assembly_of(name));
  }
  std::optional<toolchange::AssemblyId> attached;
  if (!cell.mounted.empty()) attached = assembly_of(cell.mounted);
  return toolchange::ToolChangeState::initial(attached, std::move(docks));
}

}  // namespace

CellReport execute(const Plan& plan, const CellSetup& cell, std::uint64_t seed, const ExecuteOptions& opts) {
  cell.validate();
  CellReport rep;
  rep.seed = seed;
  rep.estimated_time_s = plan.estimated_time_s;

  auto changer = initial_changer(cell);
  std::string mounted = cell.mounted;
  toolchange::TransitionLog log;
  std::map<std::string, double> box_drop_time;
  std::vector<std::string> box_order;
  double change_time = 0.0;
  int change_index = 0;
  int serve_index = 0;

  for (const auto& a : plan.actions) {
    if (!cell.foods.contains(a.food)) throw Error(ErrorCode::UnknownFood, "no belt assembly for '" + a.food + "'");
    if (a.kind == ActionKind::ToolChange) {
      const auto ci = static_cast<std::uint64_t>(change_index);
      Rng rng = Rng::derive(seed, {0xc4a9, ci});
      auto dock_attempt = toolchange::sample_attempt(cell.attempts, rng);
      auto undock_attempt = toolchange::sample_attempt(cell.attempts, rng);
      if (opts.forced_change_index && *opts.forced_change_index == change_index)
        dock_attempt = undock_attempt = opts.forced_attempt;
      ++change_index;
      ++rep.tool_changes;

      const double before = changer.clock_s;
      if (mounted.empty()) {
        changer = toolchange::undock(changer, dock_of(a.food), undock_attempt,
                                     cell.changer.insertion_force_limit_n, cell.changer, &log);
      } else {
        changer = toolchange::full_change(changer, dock_of(mounted), dock_of(a.food), dock_attempt,
                                          undock_attempt, cell.changer, &log)
                      .state;
      }
      change_time += changer.clock_s - before;
      if (changer.phase != toolchange::Phase::Attached) {
        rep.failed = true;
        rep.failure = "tool change to '" + a.food + "' faulted: " +
                      std::string(changer.fault ? to_string(changer.fault->reason) : "unknown");
        break;
      }
      mounted = a.food;
      continue;
    }

    if (a.food != mounted) {
      rep.failed = true;
      rep.failure = "serving '" + a.food + "' while '" + (mounted.empty() ? "-" : mounted) + "' is mounted";
      break;
    }
    const auto& st = cell.foods.at(a.food);
    const auto si = static_cast<std::uint64_t>(serve_index);
    ServingResult sr;
    sr.box_id = a.box_id;
    sr.food = a.food;
    sr.target_g = a.target_g;
    try {
      Rng food_rng = Rng::derive(seed, {0x5e7e, si, 0});
      const food::PileModel pile = food::pile_at_trial(st.pile, serve_index);
      food::HeldLoad load = food::pickup(pile, st.belt, food_rng);
      if (load.food_kind() == food::FoodKind::LongEntangled) food::transit_effects(load, food_rng);
      scale::SimulatedScale sc(cell.scale, Rng::derive(seed, {0x5e7e, si, 1}));
      sc.tare();
      const auto r = control::drop_to_target(a.target_g, load, sc, st.controller, food_rng);
      sr.dropped_g = r.dropped_g;
      sr.accuracy_pct = control::accuracy_pct(a.target_g, r.dropped_g);
      sr.steps = r.steps_used;
      sr.terminated_by = std::string(to_string(r.terminated_by));
      sr.elapsed_s = r.elapsed_s;
    } catch (const Error& e) {
      rep.failed = true;
      rep.failure = std::string("serving in box '") + a.box_id + "' failed: " + e.what();
      break;
    }
    ++serve_index;
    if (!box_drop_time.contains(a.box_id)) box_order.push_back(a.box_id);
    box_drop_time[a.box_id] += sr.elapsed_s;
    rep.servings.push_back(std::move(sr));
  }

  double acc = 0.0;
  for (const auto& s : rep.servings) acc += s.accuracy_pct;
  rep.overall_accuracy_pct = rep.servings.empty() ? 0.0 : acc / static_cast<double>(rep.servings.size());

  rep.total_time_s = change_time;
  for (const auto& id : box_order) rep.total_time_s += std::max(cell.timing.per_box_s, box_drop_time[id]);
  for (const auto& r : log) rep.changer_log.push_back(toolchange::format_log_line(r));
  return rep;
}

nlohmann::json report_json(const CellReport& report) {
  nlohmann::json servings = nlohmann::json::array();
  for (const auto& s : report.servings) {
    servings.push_back({{"box", s.box_id},
                        {"food", s.food},
                        {"target_g", s.target_g},
                        {"dropped_g", round_to(s.dropped_g, 6)},
                        {"accuracy_pct", round_to(s.accuracy_pct, 6)},
                        {"steps", s.steps},
                        {"terminated_by", s.terminated_by}});
  }
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"seed", report.seed},
                      {"servings", servings},
                      {"overall_accuracy_pct", round_to(report.overall_accuracy_pct, 6)},
                      {"tool_changes", report.tool_changes},
                      {"estimated_time_s", round_to(report.estimated_time_s, 6)},
                      {"total_time_s", round_to(report.total_time_s, 6)},
                      {"failed", report.failed},
                      {"tool_change_log", report.changer_log}};
  if (report.failed) j["failure"] = report.failure;
  return j;
}

std::string report_text(const CellReport& report) {
  std::ostringstream out;
  out << "box    food        target_g  dropped_g  accuracy_pct\n";
  for (const auto& s : report.servings) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %-11s %8.1f  %9.1f  %12.2f\n", s.box_id.c_str(), s.food.c_str(),
                  s.target_g, s.dropped_g, s.accuracy_pct);
    out << line;
  }
  char tail[200];
  std::snprintf(tail, sizeof tail,
                "overall accuracy %.2f%%, %d tool change(s), estimated %.0f s, simulated %.1f s\n",
                report.overall_accuracy_pct, report.tool_changes, report.estimated_time_s, report.total_time_s);
  out << tail;
  if (report.failed) out << "FAILED: " << report.failure << '\n';
  return out.str();
}

}  // namespace bitgrip::cell
