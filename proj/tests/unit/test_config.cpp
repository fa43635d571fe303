#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "bitgrip/config.hpp"
#include "bitgrip/error.hpp"

using namespace bitgrip;
using namespace bitgrip::config;
using nlohmann::json;

namespace {

ErrorCode parse_code(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config accepted: " << j.dump());
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("empty document gives defaults") {
  const auto cfg = parse_config(json::object());
  CHECK(cfg == CellConfigFile{});
  CHECK(cfg.belts.size() == 2);
  CHECK(cfg.cell.mounted == "spaghetti");
  CHECK_FALSE(cfg.order);
  CHECK(cell_setup(cfg) == cell::CellSetup::standard());
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(parse_code({{"bogus", 1}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"scale", {{"quantum", 0.1}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"spaghetti", {{"drift", {{"phase", 1}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"tool_changer", {{"timing", {{"wait_s", 1}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"tool_changer", {{"dock_magnet", {{"colour", "red"}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"order", {{"boxes", {{{"box_id", "a"}, {"servings", {{{"food", "ikura"}, {"grams", 1}}}}}}}}}}) ==
        ErrorCode::ConfigError);
}

TEST_CASE("wrong types and invalid values are ConfigError") {
  CHECK(parse_code({{"scale", {{"quantum_g", "0.1"}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"scale", {{"quantum_g", -1}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"spaghetti", {{"entanglement_prob", 2.0}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"belts", {{"ikura", {{"scoop_profile", "Square"}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"controller", {{"natto", {{"step_deg", 5}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"controller", {{"ikura", {{"mode", "sideways"}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"cell", {{"mounted", "natto"}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"cell", {{"per_box_s", -1}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"order", {{"boxes", json::array()}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code({{"tool_changer", {{"dock_magnet", {{"holding_force_n", -5}}}}}}) == ErrorCode::ConfigError);
  CHECK(parse_code(json::array()) == ErrorCode::ConfigError);
}

TEST_CASE("round trip through JSON") {
  const json in = {
      {"spaghetti", {{"entanglement_prob", 0.05}, {"drift", {{"amplitude", 0.1}, {"period_trials", 12}}}}},
      {"granular", {{"slip_prob", 0.1}}},
      {"belts",
       {{"spaghetti", {{"food_kind", "LongEntangled"}, {"gripper_width_mm", 20}, {"bit_density_per_cm2", 2}}},
        {"ikura", {{"food_kind", "GranularSlippery"}, {"scoop_profile", "Elliptical"}}}}},
      {"scale", {{"noise_sd_g", 0.02}}},
      {"controller", {{"ikura", {{"step_deg", 10}, {"mode", "dump-all"}}}}},
      {"tool_changer", {{"timing", {{"align_s", 4}}}, {"attempts", {{"alignment_sd_mm", 0.3}}}}},
      {"cell", {{"mounted", "ikura"}, {"per_box_s", 60}}},
      {"order", {{"boxes", {{{"box_id", "a"}, {"servings", {{{"food", "ikura"}, {"target_g", 7.5}}}}}}}}},
  };
  const auto cfg = parse_config(in);
  CHECK(cfg.spaghetti.entanglement_prob == 0.05);
  CHECK(cfg.spaghetti.drift.period_trials == 12);
  CHECK(cfg.belts.at("spaghetti").gripper_width_mm == 20);
  CHECK(cfg.belts.at("ikura").scoop_profile == food::ScoopProfile::Elliptical);
  CHECK(cfg.tool_changer.changer.timing.align_s == 4);
  CHECK(cfg.tool_changer.attempts.alignment_sd_mm == 0.3);
  CHECK(cfg.cell.timing.per_box_s == 60);
  REQUIRE(cfg.order);
  CHECK(cfg.order->boxes[0].servings[0].target_g == 7.5);

  const auto back = parse_config(to_json(cfg));
  CHECK(back == cfg);
  CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("property: round trip holds for perturbed numeric fields") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    CellConfigFile cfg;
    cfg.spaghetti.stickiness = rng.uniform(0, 1);
    cfg.granular.slip_prob = rng.uniform(0, 0.5);
    cfg.scale.noise_sd_g = rng.uniform(0, 0.1);
    cfg.tool_changer.changer.alignment_tolerance_mm = rng.uniform(0.5, 4);
    cfg.cell.timing.per_change_s = rng.uniform(1, 80);
    cfg.controller["spaghetti"].stop_margin_g = rng.uniform(0, 5);
    CHECK(parse_config(to_json(cfg)) == cfg);
  }
}

TEST_CASE("controller overrides apply over food defaults") {
  const auto cfg = parse_config({{"controller", {{"ikura", {{"stop_margin_g", 0.25}, {"max_steps", 30}}}}}});
  const auto ik = experiment_setup(cfg, "ikura");
  CHECK(ik.controller.stop_margin_g == 0.25);
  CHECK(ik.controller.max_steps == 30);
  CHECK(food::pile_kind(ik.pile) == food::FoodKind::GranularSlippery);
  const auto sp = experiment_setup(cfg, "spaghetti");
  CHECK(sp.controller.stop_margin_g == doctest::Approx(2.25));

  ControllerOverrides none;
  control::ControllerConfig base;
  CHECK(none.apply(base) == base);
}

TEST_CASE("lookup and file errors") {
  const CellConfigFile cfg;
  try {
    experiment_setup(cfg, "natto");
    FAIL("expected UnknownFood");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownFood);
  }
  try {
    load_config("/nonexistent/cell.json");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }

  const auto path = std::filesystem::temp_directory_path() / "bitgrip_bad_config.json";
  {
    std::ofstream(path) << "{ not json";
  }
  try {
    load_config(path);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  {
    std::ofstream(path) << R"({"cell": {"mounted": "ikura"}})";
  }
  CHECK(load_config(path).cell.mounted == "ikura");
  std::filesystem::remove(path);
}
