#include "bitgrip/config.hpp"

#include <fstream>
#include <set>

#include "bitgrip/error.hpp"

namespace bitgrip::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

// Reads fields out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) fail(path_, "unknown key '" + k + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) fail(at(key), "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) fail(at(key), "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) fail(at(key), "expected a number");
    } else {
      if (!it->is_string()) fail(at(key), "expected a string");
    }
    out = it->template get<T>();
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    T v{};
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    get(key, v);
    out = v;
  }

  /// Field parsed from a string through `parse`.
  template <class T, class F>
  void get_enum(const char* key, T& out, F parse) {
    std::string s;
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    get(key, s);
    try {
      out = parse(s);
    } catch (const Error& e) {
      fail(at(key), e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void validated(const std::string& where, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

food::BeltAssemblySpec parse_belt(const json& j, const std::string& path) {
  food::BeltAssemblySpec b;
  Section s(j, path);
  s.get_enum("food_kind", b.food_kind, food::food_kind_from_string);
  // Kind-specific defaults before the explicit fields.
  if (b.food_kind == food::FoodKind::GranularSlippery) b = food::BeltAssemblySpec::ikura();
  if (b.food_kind == food::FoodKind::PlainBelt) b = food::BeltAssemblySpec::plain();
  s.get("gripper_width_mm", b.gripper_width_mm);
  s.get("bit_density_per_cm2", b.bit_density_per_cm2);
  s.get("bit_angle_deg", b.bit_angle_deg);
  s.get("bucket_width_mm", b.bucket_width_mm);
  s.get("bucket_length_mm", b.bucket_length_mm);
  s.get_enum("scoop_profile", b.scoop_profile, food::scoop_profile_from_string);
  s.get("bit_pitch_mm", b.bit_pitch_mm);
  s.get("compartment_count", b.compartment_count);
  validated(path, [&] { b.validate(); });
  return b;
}

json belt_json(const food::BeltAssemblySpec& b) {
  return {{"food_kind", std::string(to_string(b.food_kind))},
          {"gripper_width_mm", b.gripper_width_mm},
          {"bit_density_per_cm2", b.bit_density_per_cm2},
          {"bit_angle_deg", b.bit_angle_deg},
          {"bucket_width_mm", b.bucket_width_mm},
          {"bucket_length_mm", b.bucket_length_mm},
          {"scoop_profile", std::string(to_string(b.scoop_profile))},
          {"bit_pitch_mm", b.bit_pitch_mm},
          {"compartment_count", b.compartment_count}};
}

food::SpaghettiPileModel parse_spaghetti(const json& j) {
  food::SpaghettiPileModel p;
  Section s(j, "spaghetti");
  s.get("total_strands", p.total_strands);
  s.get("strand_weight_min_g", p.strand_weight_min_g);
  s.get("strand_weight_max_g", p.strand_weight_max_g);
  s.get("entanglement_prob", p.entanglement_prob);
  s.get("stickiness", p.stickiness);
  if (const json* d = s.child("drift")) {
    Section ds(*d, "spaghetti.drift");
    ds.get("amplitude", p.drift.amplitude);
    ds.get("period_trials", p.drift.period_trials);
  }
  s.get("pickup_capacity_g", p.pickup_capacity_g);
  s.get("capacity_noise", p.capacity_noise);
  s.get("plain_pickup_min_g", p.plain_pickup_min_g);
  s.get("plain_pickup_max_g", p.plain_pickup_max_g);
  validated("spaghetti", [&] { p.validate(); });
  return p;
}

food::GranularPileModel parse_granular(const json& j) {
  food::GranularPileModel p;
  Section s(j, "granular");
  s.get("total_balls", p.total_balls);
  s.get("ball_weight_g_mean", p.ball_weight_g_mean);
  s.get("ball_weight_g_sd", p.ball_weight_g_sd);
  s.get("slip_prob", p.slip_prob);
  s.get("bucket_capacity_min_balls", p.bucket_capacity_min_balls);
  s.get("bucket_capacity_max_balls", p.bucket_capacity_max_balls);
  s.get("release_prob_per_20deg", p.release_prob_per_20deg);
  validated("granular", [&] { p.validate(); });
  return p;
}

scale::ScaleConfig parse_scale(const json& j) {
  scale::ScaleConfig c;
  Section s(j, "scale");
  s.get("quantum_g", c.quantum_g);
  s.get("settle_time_s", c.settle_time_s);
  s.get("noise_sd_g", c.noise_sd_g);
  s.get("max_capacity_g", c.max_capacity_g);
  validated("scale", [&] { c.validate(); });
  return c;
}

ControllerOverrides parse_controller(const json& j, const std::string& path) {
  ControllerOverrides o;
  Section s(j, path);
  s.get("step_deg", o.step_deg);
  s.get("stop_margin_g", o.stop_margin_g);
  s.get("debounce_reads", o.debounce_reads);
  s.get("debounce_epsilon_g", o.debounce_epsilon_g);
  s.get("max_steps", o.max_steps);
  if (s.has("mode")) {
    control::DropMode m{};
    s.get_enum("mode", m, control::drop_mode_from_string);
    o.mode = m;
  } else {
    s.child("mode");
  }
  s.get("read_interval_s", o.read_interval_s);
  s.get("stable_budget_s", o.stable_budget_s);
  validated(path, [&] { o.apply({}).validate(); });
  return o;
}

json controller_json(const ControllerOverrides& o) {
  json j = json::object();
  if (o.step_deg) j["step_deg"] = *o.step_deg;
  if (o.stop_margin_g) j["stop_margin_g"] = *o.stop_margin_g;
  if (o.debounce_reads) j["debounce_reads"] = *o.debounce_reads;
  if (o.debounce_epsilon_g) j["debounce_epsilon_g"] = *o.debounce_epsilon_g;
  if (o.max_steps) j["max_steps"] = *o.max_steps;
  if (o.mode) j["mode"] = *o.mode == control::DropMode::ClosedLoop ? "closed-loop" : "dump-all";
  if (o.read_interval_s) j["read_interval_s"] = *o.read_interval_s;
  if (o.stable_budget_s) j["stable_budget_s"] = *o.stable_budget_s;
  return j;
}

void parse_magnet(const json& j, const std::string& path, toolchange::MagnetSpec& m) {
  Section s(j, path);
  s.get("length_mm", m.length_mm);
  s.get("width_mm", m.width_mm);
  s.get("thickness_mm", m.thickness_mm);
  s.get("holding_force_n", m.holding_force_n);
}

json magnet_json(const toolchange::MagnetSpec& m) {
  return {{"length_mm", m.length_mm},
          {"width_mm", m.width_mm},
          {"thickness_mm", m.thickness_mm},
          {"holding_force_n", m.holding_force_n}};
}

ToolChangerSection parse_tool_changer(const json& j) {
  ToolChangerSection t;
  auto& c = t.changer;
  Section s(j, "tool_changer");
  if (const json* m = s.child("dock_magnet")) parse_magnet(*m, "tool_changer.dock_magnet", c.dock_magnet);
  if (const json* m = s.child("coupling_magnet"))
    parse_magnet(*m, "tool_changer.coupling_magnet", c.coupling_magnet);
  s.get("alignment_tolerance_mm", c.alignment_tolerance_mm);
  s.get("sliding_factor", c.sliding_factor);
  s.get("insertion_force_limit_n", c.insertion_force_limit_n);
  if (const json* tj = s.child("timing")) {
    Section ts(*tj, "tool_changer.timing");
    ts.get("align_s", c.timing.align_s);
    ts.get("approach_s", c.timing.approach_s);
    ts.get("retract_s", c.timing.retract_s);
    ts.get("transfer_s", c.timing.transfer_s);
    ts.get("slide_s", c.timing.slide_s);
  }
  if (const json* aj = s.child("attempts")) {
    Section as(*aj, "tool_changer.attempts");
    as.get("alignment_sd_mm", t.attempts.alignment_sd_mm);
    as.get("force_mean_n", t.attempts.force_mean_n);
    as.get("force_sd_n", t.attempts.force_sd_n);
    if (t.attempts.alignment_sd_mm < 0 || t.attempts.force_sd_n < 0)
      fail("tool_changer.attempts", "standard deviations must be >= 0");
  }
  validated("tool_changer", [&] { c.validate(); });
  return t;
}

json tool_changer_json(const ToolChangerSection& t) {
  const auto& c = t.changer;
  return {{"dock_magnet", magnet_json(c.dock_magnet)},
          {"coupling_magnet", magnet_json(c.coupling_magnet)},
          {"alignment_tolerance_mm", c.alignment_tolerance_mm},
          {"sliding_factor", c.sliding_factor},
          {"insertion_force_limit_n", c.insertion_force_limit_n},
          {"timing",
           {{"align_s", c.timing.align_s},
            {"approach_s", c.timing.approach_s},
            {"retract_s", c.timing.retract_s},
            {"transfer_s", c.timing.transfer_s},
            {"slide_s", c.timing.slide_s}}},
          {"attempts",
           {{"alignment_sd_mm", t.attempts.alignment_sd_mm},
            {"force_mean_n", t.attempts.force_mean_n},
            {"force_sd_n", t.attempts.force_sd_n}}}};
}

CellSection parse_cell(const json& j) {
  CellSection c;
  Section s(j, "cell");
  s.get("mounted", c.mounted);
  s.get("per_box_s", c.timing.per_box_s);
  s.get("per_change_s", c.timing.per_change_s);
  if (c.timing.per_box_s < 0 || c.timing.per_change_s < 0) fail("cell", "times must be >= 0");
  return c;
}

cell::PackagingOrder parse_order(const json& j) {
  cell::PackagingOrder o;
  Section s(j, "order");
  const json* boxes = s.child("boxes");
  if (!boxes || !boxes->is_array()) fail("order", "expected a 'boxes' array");
  for (std::size_t i = 0; i < boxes->size(); ++i) {
    const std::string path = "order.boxes[" + std::to_string(i) + "]";
    cell::BoxSpec box;
    Section bs((*boxes)[i], path);
    bs.get("box_id", box.box_id);
    const json* servings = bs.child("servings");
    if (!servings || !servings->is_array()) fail(path, "expected a 'servings' array");
    for (std::size_t k = 0; k < servings->size(); ++k) {
      cell::Serving sv;
      Section ss((*servings)[k], path + ".servings[" + std::to_string(k) + "]");
      ss.get("food", sv.food);
      ss.get("target_g", sv.target_g);
      box.servings.push_back(sv);
    }
    o.boxes.push_back(std::move(box));
  }
  validated("order", [&] { o.validate(); });
  return o;
}

json order_json(const cell::PackagingOrder& o) {
  json boxes = json::array();
  for (const auto& b : o.boxes) {
    json servings = json::array();
    for (const auto& s : b.servings) servings.push_back({{"food", s.food}, {"target_g", s.target_g}});
    boxes.push_back({{"box_id", b.box_id}, {"servings", servings}});
  }
  return {{"boxes", boxes}};
}

}  // namespace

control::ControllerConfig ControllerOverrides::apply(control::ControllerConfig base) const {
  if (step_deg) base.step_deg = *step_deg;
  if (stop_margin_g) base.stop_margin_g = *stop_margin_g;
  if (debounce_reads) base.debounce_reads = *debounce_reads;
  if (debounce_epsilon_g) base.debounce_epsilon_g = *debounce_epsilon_g;
  if (max_steps) base.max_steps = *max_steps;
  if (mode) base.mode = *mode;
  if (read_interval_s) base.read_interval_s = *read_interval_s;
  if (stable_budget_s) base.stable_budget_s = *stable_budget_s;
  return base;
}

std::map<std::string, food::BeltAssemblySpec> CellConfigFile::default_belts() {
  return {{"spaghetti", food::BeltAssemblySpec::spaghetti(30.0, 1.0)},
          {"ikura", food::BeltAssemblySpec::ikura(food::ScoopProfile::Circular)}};
}

CellConfigFile parse_config(const json& j) {
  CellConfigFile cfg;
  Section s(j, "config");
  if (const json* v = s.child("spaghetti")) cfg.spaghetti = parse_spaghetti(*v);
  if (const json* v = s.child("granular")) cfg.granular = parse_granular(*v);
  if (const json* v = s.child("belts")) {
    if (!v->is_object()) fail("belts", "expected an object keyed by food name");
    cfg.belts.clear();
    for (const auto& [name, b] : v->items()) cfg.belts.emplace(name, parse_belt(b, "belts." + name));
  }
  if (const json* v = s.child("scale")) cfg.scale = parse_scale(*v);
  if (const json* v = s.child("controller")) {
    if (!v->is_object()) fail("controller", "expected an object keyed by food name");
    for (const auto& [name, c] : v->items()) cfg.controller.emplace(name, parse_controller(c, "controller." + name));
  }
  if (const json* v = s.child("tool_changer")) cfg.tool_changer = parse_tool_changer(*v);
  if (const json* v = s.child("cell")) cfg.cell = parse_cell(*v);
  if (const json* v = s.child("order")) cfg.order = parse_order(*v);

  for (const auto& [name, c] : cfg.controller)
    if (!cfg.belts.contains(name)) fail("controller." + name, "no belt for this food");
  if (!cfg.cell.mounted.empty() && !cfg.belts.contains(cfg.cell.mounted))
    fail("cell.mounted", "no belt for '" + cfg.cell.mounted + "'");
  return cfg;
}

CellConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const CellConfigFile& cfg) {
  const auto& sp = cfg.spaghetti;
  const auto& gr = cfg.granular;
  json belts = json::object();
  for (const auto& [name, b] : cfg.belts) belts[name] = belt_json(b);
  json controller = json::object();
  for (const auto& [name, c] : cfg.controller) controller[name] = controller_json(c);
  json j = {
      {"spaghetti",
       {{"total_strands", sp.total_strands},
        {"strand_weight_min_g", sp.strand_weight_min_g},
        {"strand_weight_max_g", sp.strand_weight_max_g},
        {"entanglement_prob", sp.entanglement_prob},
        {"stickiness", sp.stickiness},
        {"drift", {{"amplitude", sp.drift.amplitude}, {"period_trials", sp.drift.period_trials}}},
        {"pickup_capacity_g", sp.pickup_capacity_g},
        {"capacity_noise", sp.capacity_noise},
        {"plain_pickup_min_g", sp.plain_pickup_min_g},
        {"plain_pickup_max_g", sp.plain_pickup_max_g}}},
      {"granular",
       {{"total_balls", gr.total_balls},
        {"ball_weight_g_mean", gr.ball_weight_g_mean},
        {"ball_weight_g_sd", gr.ball_weight_g_sd},
        {"slip_prob", gr.slip_prob},
        {"bucket_capacity_min_balls", gr.bucket_capacity_min_balls},
        {"bucket_capacity_max_balls", gr.bucket_capacity_max_balls},
        {"release_prob_per_20deg", gr.release_prob_per_20deg}}},
      {"belts", belts},
      {"scale",
       {{"quantum_g", cfg.scale.quantum_g},
        {"settle_time_s", cfg.scale.settle_time_s},
        {"noise_sd_g", cfg.scale.noise_sd_g},
        {"max_capacity_g", cfg.scale.max_capacity_g}}},
      {"controller", controller},
      {"tool_changer", tool_changer_json(cfg.tool_changer)},
      {"cell",
       {{"mounted", cfg.cell.mounted},
        {"per_box_s", cfg.cell.timing.per_box_s},
        {"per_change_s", cfg.cell.timing.per_change_s}}},
  };
  if (cfg.order) j["order"] = order_json(*cfg.order);
  return j;
}

food::PileModel pile_for(const CellConfigFile& cfg, const std::string& food) {
  const auto it = cfg.belts.find(food);
  if (it == cfg.belts.end()) throw Error(ErrorCode::UnknownFood, "no belt assembly for '" + food + "'");
  if (it->second.food_kind == food::FoodKind::GranularSlippery) return cfg.granular;
  return cfg.spaghetti;
}

control::ExperimentSetup experiment_setup(const CellConfigFile& cfg, const std::string& food) {
  control::ExperimentSetup s;
  s.food_name = food;
  s.pile = pile_for(cfg, food);
  s.belt = cfg.belts.at(food);
  s.scale = cfg.scale;
  s.controller = control::ControllerConfig::defaults_for(s.pile, s.belt, s.scale);
  if (const auto it = cfg.controller.find(food); it != cfg.controller.end())
    s.controller = it->second.apply(s.controller);
  return s;
}

cell::CellSetup cell_setup(const CellConfigFile& cfg) {
  cell::CellSetup c;
  c.scale = cfg.scale;
  c.changer = cfg.tool_changer.changer;
  c.attempts = cfg.tool_changer.attempts;
  c.timing = cfg.cell.timing;
  c.mounted = cfg.cell.mounted;
  for (const auto& [name, belt] : cfg.belts) {
    const auto setup = experiment_setup(cfg, name);
    c.foods.emplace(name, cell::FoodStation{setup.pile, setup.belt, setup.controller});
  }
  return c;
}

}  // namespace bitgrip::config
