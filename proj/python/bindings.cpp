#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bitgrip/bit_eval.hpp"
#include "bitgrip/config.hpp"
#include "bitgrip/drop_controller.hpp"
#include "bitgrip/error.hpp"
#include "bitgrip/experiment.hpp"
#include "bitgrip/orchestrator.hpp"
#include "bitgrip/tool_changer.hpp"

namespace py = pybind11;
using namespace bitgrip;

namespace {

// Structured results cross the boundary as JSON text; the Python side decodes.
config::CellConfigFile load(const std::optional<std::string>& path) {
  return path ? config::load_config(*path) : config::CellConfigFile{};
}

std::string simulate_drop(const std::string& food, const std::vector<double>& targets, int trials,
                          std::uint64_t seed, const std::optional<std::string>& mode,
                          const std::optional<std::string>& config_path) {
  auto setup = config::experiment_setup(load(config_path), food);
  if (mode) setup.controller.mode = control::drop_mode_from_string(*mode);
  py::gil_scoped_release release;
  const auto report = control::run_weight_class_experiment(setup, targets, trials, seed);
  nlohmann::json j = control::summary_json(report);
  j["csv"] = control::to_csv(report);
  return j.dump();
}

std::string pack(std::uint64_t seed, const std::optional<std::string>& config_path) {
  const auto cfg = load(config_path);
  const auto cell = config::cell_setup(cfg);
  const auto order = cfg.order.value_or(cell::PackagingOrder::two_box_demo());
  const auto p = cell::plan(order, cell);
  py::gil_scoped_release release;
  return cell::report_json(cell::execute(p, cell, seed)).dump();
}

std::string tool_change(int cycles, std::uint64_t seed, double misalignment_mm) {
  using namespace toolchange;
  const ChangerConfig cfg;
  const AssemblyId a{"belt_a"}, b{"belt_b"};
  const DockId da{"dock_a"}, db{"dock_b"};
  auto state = ToolChangeState::initial(a, {{da, std::nullopt}, {db, b}});
  Rng rng = Rng::derive(seed, {0x70c1});
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < cycles; ++i) {
    auto d = sample_attempt(AttemptDistribution{}, rng);
    const auto u = sample_attempt(AttemptDistribution{}, rng);
    if (i == 0 && misalignment_mm > 0) d.alignment_error_mm = misalignment_mm;
    const bool forward = state.attached == a;
    const auto r = full_change(state, forward ? da : db, forward ? db : da, d, u, cfg);
    nlohmann::json c = {{"cycle", i}, {"success", r.success}, {"elapsed_s", r.elapsed_s}};
    if (r.state.fault) c["fault"] = std::string(to_string(r.state.fault->reason));
    out.push_back(c);
    state = r.success ? r.state : reset(r.state);
    if (!r.success) break;
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation core for the modular belt gripper cell";

  static py::exception<Error> error_type(m, "BitgripError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  m.def("accuracy_pct", &control::accuracy_pct, py::arg("target_g"), py::arg("dropped_g"));

  m.def(
      "score_spaghetti",
      [](double dropped, double accidental, double damaged, std::vector<double> w) {
        if (w.size() != 3) throw Error(ErrorCode::InvalidArgument, "weights need three values");
        biteval::SpaghettiTrial t;
        t.dropped_weight_g = dropped;
        t.accidental_drops = accidental;
        t.damaged_strands = damaged;
        return biteval::score_spaghetti(t, {w[0], w[1], w[2]});
      },
      py::arg("dropped_g"), py::arg("accidental_drops"), py::arg("damaged_strands"),
      py::arg("weights") = std::vector<double>{1, 1, 2});

  m.def(
      "score_ikura",
      [](double dropped, double remaining, double ease, std::vector<double> w) {
        if (w.size() != 3) throw Error(ErrorCode::InvalidArgument, "weights need three values");
        biteval::IkuraTrial t;
        t.dropped_weight_g = dropped;
        t.remaining_in_bit = remaining;
        t.ease_of_drop = ease;
        return biteval::score_ikura(t, {w[0], w[1], w[2]});
      },
      py::arg("dropped_g"), py::arg("remaining_in_bit"), py::arg("ease_of_drop"),
      py::arg("weights") = std::vector<double>{1, 0.5, 1});

  m.def("_simulate_drop", &simulate_drop, py::arg("food"), py::arg("targets"), py::arg("trials"), py::arg("seed"),
        py::arg("mode") = py::none(), py::arg("config_path") = py::none());
  m.def("_pack", &pack, py::arg("seed"), py::arg("config_path") = py::none());
  m.def("_tool_change", &tool_change, py::arg("cycles"), py::arg("seed"), py::arg("misalignment_mm") = 0.0);
}
