// bitgrip: command-line front end for the gripper cell simulator.
//
//   bitgrip simulate-drop --food ikura --target 15 --trials 10 --seed 7 --out runs/ikura15
//   bitgrip bit-eval --trials-csv measured_spaghetti_bits.csv
//   bitgrip bit-eval --simulate --food spaghetti --grid 30:1,30:2 --seed 3
//   bitgrip tool-change --cycles 10 --inject-misalignment 2.5mm
//   bitgrip pack --config cell.json --seed 11
//
// Flags given on the command line override values from --config.
// Exit codes: 0 ok, 2 usage, 3 config or input, 4 simulation fault.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bitgrip/bit_eval.hpp"
#include "bitgrip/config.hpp"
#include "bitgrip/error.hpp"
#include "bitgrip/experiment.hpp"
#include "bitgrip/format.hpp"
#include "bitgrip/orchestrator.hpp"
#include "bitgrip/tool_changer.hpp"

namespace {

using namespace bitgrip;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitFault = 4;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";
  int parallel_trials = 1;
};

config::CellConfigFile load(const Globals& g) {
  if (g.config_path.empty()) return {};
  return config::load_config(g.config_path);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

// Prints to stdout, or to --out when given.
void emit(const Globals& g, const std::string& content) {
  if (g.out.empty())
    std::cout << content;
  else
    write_file(g.out, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// "2.5mm", "2.5 mm" or "2.5"
double parse_length_mm(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "cannot read length '" + s + "'");
  }
  std::string unit = s.substr(used);
  unit.erase(0, unit.find_first_not_of(' '));
  if (!unit.empty() && unit != "mm") throw Error(ErrorCode::InvalidArgument, "unsupported unit in '" + s + "'");
  return v;
}

// --- simulate-drop ---------------------------------------------------------

struct DropArgs {
  std::string food = "spaghetti";
  std::vector<double> targets;
  int trials = 10;
  std::string mode;
};

int cmd_simulate_drop(const Globals& g, const DropArgs& a) {
  const auto cfg = load(g);
  auto setup = config::experiment_setup(cfg, a.food);
  if (!a.mode.empty()) setup.controller.mode = control::drop_mode_from_string(a.mode);
  const auto report = control::run_weight_class_experiment(setup, a.targets, a.trials, g.seed, g.parallel_trials);

  const std::string csv = control::to_csv(report);
  const std::string summary = dump(control::summary_json(report));
  if (!g.out.empty()) {
    write_file(g.out + ".csv", csv);
    write_file(g.out + ".json", summary);
  }
  if (g.format == "csv")
    std::cout << csv;
  else if (g.format == "json")
    std::cout << summary;
  else
    std::cout << control::to_text(report);

  for (const auto& c : report.classes)
    if (c.failures > 0) return kExitFault;
  return kExitOk;
}

// --- bit-eval --------------------------------------------------------------

struct EvalArgs {
  std::string trials_csv;
  bool simulate = false;
  std::string food = "spaghetti";
  std::vector<std::string> grid;
  std::vector<double> weights;
  int sweep_trials = 10;
};

biteval::ScoreWeights weights_for(const EvalArgs& a, bool ikura) {
  auto w = ikura ? biteval::ScoreWeights::ikura() : biteval::ScoreWeights::spaghetti();
  if (!a.weights.empty()) {
    if (a.weights.size() != 3) throw Error(ErrorCode::InvalidArgument, "--weights takes three values");
    w = {a.weights[0], a.weights[1], a.weights[2]};
  }
  w.validate();
  return w;
}

template <class Trial>
std::string render_ranked(const Globals& g, const std::vector<biteval::Ranked<Trial>>& ranked) {
  if (g.format == "csv") return biteval::ranked_csv(ranked);
  if (g.format == "json") {
    // The CSV already holds every column; the JSON mirrors it row by row.
    std::istringstream in(biteval::ranked_csv(ranked));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
      std::istringstream h(line);
      for (std::string f; std::getline(h, f, ',');) header.push_back(f);
    }
    json rows = json::array();
    while (std::getline(in, line)) {
      std::istringstream r(line);
      json row = json::object();
      std::size_t i = 0;
      for (std::string f; std::getline(r, f, ',') && i < header.size(); ++i) {
        char* end = nullptr;
        const double v = std::strtod(f.c_str(), &end);
        if (end && *end == '\0' && !f.empty())
          row[header[i]] = v;
        else
          row[header[i]] = f;
      }
      rows.push_back(row);
    }
    return dump({{"schema_version", kSchemaVersion}, {"ranked", rows}});
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    char line[160];
    std::snprintf(line, sizeof line, "%2zu. %-24s score %8.3f\n", i + 1, ranked[i].trial.label().c_str(),
                  ranked[i].score);
    out << line;
  }
  return out.str();
}

std::vector<food::BeltAssemblySpec> parse_grid(const EvalArgs& a, bool ikura) {
  if (a.grid.empty()) return ikura ? biteval::ikura_reference_grid() : biteval::spaghetti_reference_grid();
  std::vector<food::BeltAssemblySpec> grid;
  for (const auto& item : a.grid) {
    if (ikura) {
      grid.push_back(food::BeltAssemblySpec::ikura(food::scoop_profile_from_string(item)));
      continue;
    }
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "spaghetti grid entries are WIDTH_MM:DENSITY, got '" + item + "'");
    try {
      grid.push_back(food::BeltAssemblySpec::spaghetti(std::stod(item.substr(0, colon)),
                                                       std::stod(item.substr(colon + 1))));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "bad grid entry '" + item + "'");
    }
  }
  return grid;
}

int cmd_bit_eval(const Globals& g, const EvalArgs& a) {
  const bool ikura = a.food == "ikura";
  if (!ikura && a.food != "spaghetti") throw Error(ErrorCode::UnknownFood, "bit-eval food must be spaghetti or ikura");
  const auto w = weights_for(a, ikura);

  if (!a.simulate) {
    std::ifstream in(a.trials_csv);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + a.trials_csv + "'");
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    if (first.find("scoop_profile") != std::string::npos) {
      const auto trials = biteval::read_ikura_csv(in);
      emit(g, render_ranked(g, biteval::rank_configs(trials, w)));
    } else {
      const auto trials = biteval::read_spaghetti_csv(in);
      emit(g, render_ranked(g, biteval::rank_configs(trials, w)));
    }
    return kExitOk;
  }

  const auto cfg = load(g);
  biteval::SweepOptions opts;
  opts.trials = a.sweep_trials;
  opts.seed = g.seed;
  const auto grid = parse_grid(a, ikura);
  if (ikura) {
    const auto rows = biteval::sweep_ikura(grid, cfg.granular, opts, w);
    std::vector<biteval::IkuraTrial> means;
    for (const auto& r : rows) means.push_back(r.means);
    emit(g, render_ranked(g, biteval::rank_configs(means, w)));
  } else {
    const auto rows = biteval::sweep_spaghetti(grid, cfg.spaghetti, opts, w);
    std::vector<biteval::SpaghettiTrial> means;
    for (const auto& r : rows) means.push_back(r.means);
    emit(g, render_ranked(g, biteval::rank_configs(means, w)));
  }
  return kExitOk;
}

// --- tool-change -----------------------------------------------------------

struct ChangeArgs {
  int cycles = 10;
  std::string inject_misalignment;
  std::optional<double> inject_force;
  int inject_cycle = 0;
};

int cmd_tool_change(const Globals& g, const ChangeArgs& a) {
  using namespace bitgrip::toolchange;
  const auto cfg = load(g);
  const auto& changer = cfg.tool_changer.changer;
  changer.validate();

  const AssemblyId belt_a{"belt_a"}, belt_b{"belt_b"};
  const DockId dock_a{"dock_a"}, dock_b{"dock_b"};
  auto fresh = [&](bool a_mounted) {
    return ToolChangeState::initial(a_mounted ? belt_a : belt_b,
                                    {{dock_a, a_mounted ? std::nullopt : std::optional{belt_a}},
                                     {dock_b, a_mounted ? std::optional{belt_b} : std::nullopt}});
  };

  Rng rng = Rng::derive(g.seed, {0x70c1});
  ToolChangeState state = fresh(true);
  bool a_mounted = true;
  TransitionLog log;
  json cycles = json::array();
  int successes = 0;
  double clock = 0.0;
  for (int c = 0; c < a.cycles; ++c) {
    ChangeAttempt dock_attempt = sample_attempt(cfg.tool_changer.attempts, rng);
    ChangeAttempt undock_attempt = sample_attempt(cfg.tool_changer.attempts, rng);
    if (c == a.inject_cycle) {
      if (!a.inject_misalignment.empty())
        dock_attempt.alignment_error_mm = undock_attempt.alignment_error_mm = parse_length_mm(a.inject_misalignment);
      if (a.inject_force) undock_attempt.insertion_force_n = *a.inject_force;
    }
    state.clock_s = clock;
    const auto out = full_change(state, a_mounted ? dock_a : dock_b, a_mounted ? dock_b : dock_a, dock_attempt,
                                 undock_attempt, changer, &log);
    clock = out.state.clock_s;
    json entry = {{"cycle", c}, {"success", out.success}, {"elapsed_s", round_to(out.elapsed_s, 6)}};
    if (out.success) {
      ++successes;
      state = out.state;
      a_mounted = !a_mounted;
    } else {
      entry["fault"] = std::string(to_string(out.state.fault->reason));
      // Operator recovery: the cell is re-seated in its starting layout.
      const auto recovered = reset(out.state, &log);
      state = fresh(a_mounted);
      state.clock_s = recovered.clock_s;
    }
    cycles.push_back(entry);
  }
  const int failures = a.cycles - successes;

  std::string rendered;
  if (g.format == "json") {
    json lines = json::array();
    for (const auto& r : log) lines.push_back(format_log_line(r));
    rendered = dump({{"schema_version", kSchemaVersion},
                     {"seed", g.seed},
                     {"cycles", cycles},
                     {"successes", successes},
                     {"failures", failures},
                     {"log", lines}});
  } else if (g.format == "csv") {
    std::ostringstream out;
    out << "timestamp_s,from,to,assembly,fault\n";
    for (const auto& r : log)
      out << fmt_num(r.timestamp_s) << ',' << to_string(r.from) << ',' << to_string(r.to) << ','
          << (r.assembly ? r.assembly->value : "") << ',' << (r.fault ? std::string(to_string(*r.fault)) : "")
          << '\n';
    rendered = out.str();
  } else {
    std::ostringstream out;
    for (const auto& r : log) out << format_log_line(r) << '\n';
    out << "successes=" << successes << " failures=" << failures << " cycles=" << a.cycles << '\n';
    rendered = out.str();
  }
  emit(g, rendered);
  return failures > 0 ? kExitFault : kExitOk;
}

// --- pack ------------------------------------------------------------------

int cmd_pack(const Globals& g) {
  const auto cfg = load(g);
  const auto setup = config::cell_setup(cfg);
  const auto order = cfg.order.value_or(cell::PackagingOrder::two_box_demo());
  const auto p = cell::plan(order, setup);
  const auto report = cell::execute(p, setup, g.seed);
  if (g.format == "json" || g.format == "csv") {
    json j = cell::report_json(report);
    j["plan"] = json::array();
    for (const auto& act : p.actions) {
      if (act.kind == cell::ActionKind::ToolChange)
        j["plan"].push_back({{"action", "tool_change"}, {"food", act.food}});
      else
        j["plan"].push_back({{"action", "serve"}, {"box", act.box_id}, {"food", act.food}, {"target_g", act.target_g}});
    }
    if (g.format == "json") {
      emit(g, dump(j));
    } else {
      std::ostringstream out;
      out << "box,food,target_g,dropped_g,accuracy_pct,steps,terminated_by\n";
      for (const auto& s : report.servings)
        out << s.box_id << ',' << s.food << ',' << fmt_num(s.target_g) << ',' << fmt_num(s.dropped_g) << ','
            << fmt_num(round_to(s.accuracy_pct, 6)) << ',' << s.steps << ',' << s.terminated_by << '\n';
      emit(g, out.str());
    }
  } else {
    emit(g, cell::report_text(report));
  }
  return report.failed ? kExitFault : kExitOk;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::EmptyInput:
    case ErrorCode::UnknownFood:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidTarget:
    case ErrorCode::KindMismatch:
      return kExitConfig;
    default:
      return kExitFault;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a bit-based food gripper cell"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Cell configuration (JSON)");
  app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_option("--out", g.out, "Output path (simulate-drop: prefix for .csv and .json)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--parallel-trials", g.parallel_trials, "Worker threads for trials")
      ->check(CLI::PositiveNumber);

  DropArgs drop;
  auto* sim = app.add_subcommand("simulate-drop", "Weight-class drop experiment");
  sim->add_option("--food", drop.food, "Food name (a belt in the config)");
  sim->add_option("--target,--targets", drop.targets, "Target weights in grams")->required()->delimiter(',');
  sim->add_option("--trials", drop.trials, "Trials per class")->check(CLI::PositiveNumber);
  sim->add_option("--mode", drop.mode, "Override the controller mode")
      ->check(CLI::IsMember({"closed-loop", "dump-all"}));

  EvalArgs eval;
  auto* be = app.add_subcommand("bit-eval", "Score and rank bit configurations");
  auto* csv_opt = be->add_option("--trials-csv", eval.trials_csv, "Measured trials (CSV)");
  auto* sim_flag = be->add_flag("--simulate", eval.simulate, "Run a simulated sweep instead");
  csv_opt->excludes(sim_flag);
  be->add_option("--food", eval.food, "spaghetti or ikura")->check(CLI::IsMember({"spaghetti", "ikura"}));
  be->add_option("--grid", eval.grid, "Sweep configs: WIDTH_MM:DENSITY or scoop profile names")->delimiter(',');
  be->add_option("--weights", eval.weights, "Score weights w1,w2,w3")->delimiter(',');
  be->add_option("--sweep-trials", eval.sweep_trials, "Trials per simulated config")->check(CLI::PositiveNumber);

  ChangeArgs change;
  auto* tc = app.add_subcommand("tool-change", "Repeated full tool-change cycles");
  tc->add_option("--cycles", change.cycles, "Number of cycles")->check(CLI::NonNegativeNumber);
  tc->add_option("--inject-misalignment", change.inject_misalignment, "Alignment error, e.g. 2.5mm");
  tc->add_option("--inject-force", change.inject_force, "Insertion force in N");
  tc->add_option("--inject-cycle", change.inject_cycle, "Cycle receiving the injected values")
      ->check(CLI::NonNegativeNumber);

  auto* pack = app.add_subcommand("pack", "Plan and run a packaging order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (be->parsed() && eval.trials_csv.empty() && !eval.simulate) {
    std::cerr << "bit-eval: one of --trials-csv or --simulate is required\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate_drop(g, drop);
    if (be->parsed()) return cmd_bit_eval(g, eval);
    if (tc->parsed()) return cmd_tool_change(g, change);
    if (pack->parsed()) return cmd_pack(g);
  } catch (const Error& e) {
    std::cerr << "bitgrip: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "bitgrip: " << e.what() << '\n';
    return kExitFault;
  }
  return kExitUsage;
}
