#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "bitgrip/drop_controller.hpp"
#include "bitgrip/experiment.hpp"
#include "bitgrip/food_model.hpp"
#include "bitgrip/orchestrator.hpp"
#include "bitgrip/scale.hpp"
#include "bitgrip/tool_changer.hpp"

namespace bitgrip::config {

/// Controller fields set in the file. Anything left empty falls back to
/// ControllerConfig::defaults_for the food.
struct ControllerOverrides {
  std::optional<double> step_deg;
  std::optional<double> stop_margin_g;
  std::optional<int> debounce_reads;
  std::optional<double> debounce_epsilon_g;
  std::optional<int> max_steps;
  std::optional<control::DropMode> mode;
  std::optional<double> read_interval_s;
  std::optional<double> stable_budget_s;

  control::ControllerConfig apply(control::ControllerConfig base) const;
  bool operator==(const ControllerOverrides&) const = default;
};

struct ToolChangerSection {
  toolchange::ChangerConfig changer{};
  toolchange::AttemptDistribution attempts{};
  bool operator==(const ToolChangerSection&) const = default;
};

struct CellSection {
  std::string mounted = "spaghetti";
  cell::CellTiming timing{};
  bool operator==(const CellSection&) const = default;
};

/// One JSON document describing the whole cell. Every section and field is
/// optional; unknown keys are rejected. Belts are keyed by food name, and a
/// food's pile follows its belt kind (buckets: granular, else spaghetti).
struct CellConfigFile {
  food::SpaghettiPileModel spaghetti{};
  food::GranularPileModel granular{};
  std::map<std::string, food::BeltAssemblySpec> belts = default_belts();
  scale::ScaleConfig scale{};
  std::map<std::string, ControllerOverrides> controller;
  ToolChangerSection tool_changer{};
  CellSection cell{};
  std::optional<cell::PackagingOrder> order;

  bool operator==(const CellConfigFile&) const = default;

  static std::map<std::string, food::BeltAssemblySpec> default_belts();
};

/// Throws Error(ConfigError) on unknown keys, wrong types or invalid values.
CellConfigFile parse_config(const nlohmann::json& j);
CellConfigFile load_config(const std::filesystem::path& path);
nlohmann::json to_json(const CellConfigFile& cfg);

food::PileModel pile_for(const CellConfigFile& cfg, const std::string& food);
/// UnknownFood if the food has no belt.
control::ExperimentSetup experiment_setup(const CellConfigFile& cfg, const std::string& food);
cell::CellSetup cell_setup(const CellConfigFile& cfg);

}  // namespace bitgrip::config
