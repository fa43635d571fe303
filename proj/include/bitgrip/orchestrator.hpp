#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitgrip/drop_controller.hpp"
#include "bitgrip/food_model.hpp"
#include "bitgrip/scale.hpp"
#include "bitgrip/tool_changer.hpp"

namespace bitgrip::cell {

struct Serving {
  std::string food;
  double target_g = 0.0;
  bool operator==(const Serving&) const = default;
};

struct BoxSpec {
  std::string box_id;
  std::vector<Serving> servings;
  bool operator==(const BoxSpec&) const = default;
};

struct PackagingOrder {
  std::vector<BoxSpec> boxes;

  void validate() const;
  bool operator==(const PackagingOrder&) const = default;

  /// Two boxes: 50 g spaghetti + 5 g ikura, then 10 g spaghetti + 20 g ikura.
  static PackagingOrder two_box_demo();
};

enum class ActionKind { Serve, ToolChange };

struct Action {
  ActionKind kind = ActionKind::Serve;
  std::string box_id;  // empty for tool changes
  std::string food;    // food served, or food changed to
  double target_g = 0.0;
  bool operator==(const Action&) const = default;

  static Action serve(std::string box, std::string food, double target_g) {
    return {ActionKind::Serve, std::move(box), std::move(food), target_g};
  }
  static Action change_to(std::string food) { return {ActionKind::ToolChange, {}, std::move(food), 0.0}; }
};

struct Plan {
  std::vector<Action> actions;
  double estimated_time_s = 0.0;

  int tool_changes() const;
  int servings() const;
  /// Distinct boxes served.
  int boxes() const;
};

struct CellTiming {
  double per_box_s = 70.0;
  double per_change_s = 40.0;
  bool operator==(const CellTiming&) const = default;
};

/// boxes·per_box_s + changes·per_change_s
double estimate_time(const Plan& plan, const CellTiming& timing = {});

/// Pile, belt assembly and controller tuning for one food.
struct FoodStation {
  food::PileModel pile;
  food::BeltAssemblySpec belt;
  control::ControllerConfig controller;
  bool operator==(const FoodStation&) const = default;

  static FoodStation make(food::PileModel pile, food::BeltAssemblySpec belt, const scale::ScaleConfig& scale);
};

struct CellSetup {
  std::map<std::string, FoodStation> foods;
  std::string mounted;  // empty: nothing on the gripper
  scale::ScaleConfig scale{};
  toolchange::ChangerConfig changer{};
  toolchange::AttemptDistribution attempts{};
  CellTiming timing{};

  void validate() const;
  bool operator==(const CellSetup&) const = default;

  /// Spaghetti on a 30 mm, 1 bit/cm² spoke belt and ikura on circular
  /// scoops, spaghetti mounted.
  static CellSetup standard();
};

/// Servings grouped by food: the mounted food's group first (if ordered),
/// the rest in order of first appearance; box order kept within a group.
Plan plan(const PackagingOrder& order, const CellSetup& cell);

/// Fewest changes any serving order can achieve, by enumerating every
/// distinct permutation. Exponential; for small orders only.
int brute_force_min_changes(const PackagingOrder& order, const std::string& mounted);

struct ServingResult {
  std::string box_id;
  std::string food;
  double target_g = 0.0;
  double dropped_g = 0.0;
  double accuracy_pct = 0.0;
  int steps = 0;
  std::string terminated_by;
  double elapsed_s = 0.0;
};

struct CellReport {
  std::vector<ServingResult> servings;
  double overall_accuracy_pct = 0.0;
  int tool_changes = 0;
  double estimated_time_s = 0.0;
  double total_time_s = 0.0;
  bool failed = false;
  std::string failure;
  std::vector<std::string> changer_log;
  std::uint64_t seed = 0;
};

struct ExecuteOptions {
  /// Replaces the sampled attempts of the n-th tool change (0-based).
  std::optional<int> forced_change_index;
  toolchange::ChangeAttempt forced_attempt{};
};

/// Runs the plan on a simulated cell. Each serving is a fresh pickup with
/// its own random streams. A tool-change fault or drop error stops the run;
/// servings completed before it stay in the report.
CellReport execute(const Plan& plan, const CellSetup& cell, std::uint64_t seed,
                   const ExecuteOptions& opts = {});

nlohmann::json report_json(const CellReport& report);
std::string report_text(const CellReport& report);

}  // namespace bitgrip::cell
