#include "bitgrip/tool_changer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bitgrip/error.hpp"

namespace bitgrip::toolchange {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Attached: return "Attached";
    case Phase::AligningDock: return "AligningDock";
    case Phase::DockContact: return "DockContact";
    case Phase::DockedRetracting: return "DockedRetracting";
    case Phase::Empty: return "Empty";
    case Phase::AligningNew: return "AligningNew";
    case Phase::Inserting: return "Inserting";
    case Phase::Engaged: return "Engaged";
    case Phase::SlidingUp: return "SlidingUp";
    case Phase::Complete: return "Complete";
    case Phase::Faulted: return "Faulted";
  }
  return "?";
}

std::string_view to_string(FaultReason r) {
  switch (r) {
    case FaultReason::Misalignment: return "MisalignmentFault";
    case FaultReason::Retention: return "RetentionFault";
    case FaultReason::ForceLimit: return "ForceLimitFault";
    case FaultReason::Extraction: return "ExtractionFault";
    case FaultReason::Injected: return "InjectedFault";
  }
  return "?";
}

void MagnetSpec::validate() const {
  if (!(holding_force_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "holding_force_n must be > 0");
  if (length_mm < 0 || width_mm < 0 || thickness_mm < 0)
    throw Error(ErrorCode::InvalidArgument, "magnet dimensions must be >= 0");
}

void ChangerConfig::validate() const {
  dock_magnet.validate();
  coupling_magnet.validate();
  if (alignment_tolerance_mm < 0) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  if (sliding_factor < 0) throw Error(ErrorCode::InvalidArgument, "sliding_factor must be >= 0");
  if (!(insertion_force_limit_n > 0))
    throw Error(ErrorCode::InvalidArgument, "insertion_force_limit_n must be > 0");
  const auto& t = timing;
  if (t.align_s < 0 || t.approach_s < 0 || t.retract_s < 0 || t.transfer_s < 0 || t.slide_s < 0)
    throw Error(ErrorCode::InvalidArgument, "phase durations must be >= 0");
}

bool retention_holds(const ChangerConfig& cfg) {
  return cfg.dock_magnet.holding_force_n > cfg.coupling_magnet.holding_force_n;
}

bool extraction_succeeds(const ChangerConfig& cfg) {
  return cfg.coupling_magnet.holding_force_n > cfg.sliding_factor * cfg.dock_magnet.holding_force_n;
}

ToolChangeState ToolChangeState::initial(std::optional<AssemblyId> attached,
                                         std::map<DockId, std::optional<AssemblyId>> docks) {
  ToolChangeState s;
  s.attached = std::move(attached);
  s.docks = std::move(docks);
  s.phase = s.attached ? Phase::Attached : Phase::Empty;
  if (s.attached) s.assemblies.push_back(*s.attached);
  for (const auto& [id, a] : s.docks)
    if (a) s.assemblies.push_back(*a);
  std::sort(s.assemblies.begin(), s.assemblies.end());
  if (std::adjacent_find(s.assemblies.begin(), s.assemblies.end()) != s.assemblies.end())
    throw Error(ErrorCode::InvalidArgument, "an assembly can only be in one place");
  check_ownership(s);
  return s;
}

void check_ownership(const ToolChangeState& s) {
  std::vector<AssemblyId> seen;
  if (s.attached) seen.push_back(*s.attached);
  for (const auto& [id, a] : s.docks)
    if (a) seen.push_back(*a);
  std::sort(seen.begin(), seen.end());
  if (seen != s.assemblies) throw std::logic_error("assembly ownership violated");
  if (s.phase == Phase::Attached && !s.attached) throw std::logic_error("Attached without an assembly");
  if (s.phase == Phase::Empty && s.attached) throw std::logic_error("Empty while holding an assembly");
}

std::string format_log_line(const LogRecord& r) {
  char t[32];
  std::snprintf(t, sizeof t, "%.3f", r.timestamp_s);
  return std::string("t=") + t + " from=" + std::string(to_string(r.from)) + " to=" +
         std::string(to_string(r.to)) + " assembly=" + (r.assembly ? r.assembly->value : "-") +
         " fault=" + (r.fault ? std::string(to_string(*r.fault)) : "-");
}

namespace {

[[noreturn]] void illegal(const ToolChangeState& s, std::string_view event) {
  throw Error(ErrorCode::IllegalTransition,
              std::string(event) + " not allowed in phase " + std::string(to_string(s.phase)));
}

std::optional<AssemblyId>& dock_slot(ToolChangeState& s, const DockId& d) {
  const auto it = s.docks.find(d);
  if (it == s.docks.end()) throw Error(ErrorCode::UnknownDock, "no dock '" + d.value + "'");
  return it->second;
}

// The assembly being handled in the current phase, for logging.
std::optional<AssemblyId> handled_assembly(const ToolChangeState& s) {
  if (s.attached) return s.attached;
  if (s.active_dock) {
    const auto it = s.docks.find(*s.active_dock);
    if (it != s.docks.end()) return it->second;
  }
  return std::nullopt;
}

class Transition {
 public:
  Transition(const ToolChangeState& from, TransitionLog* log) : next_(from), from_(from.phase), log_(log) {}

  ToolChangeState& state() { return next_; }

  ToolChangeState go(Phase to, double duration_s) {
    next_.clock_s += duration_s;
    next_.phase = to;
    return finish(std::nullopt);
  }

  ToolChangeState fault(FaultReason reason) {
    next_.fault = Fault{reason, from_};
    next_.phase = Phase::Faulted;
    return finish(reason);
  }

 private:
  ToolChangeState finish(std::optional<FaultReason> reason) {
    check_ownership(next_);
    if (log_) log_->push_back({next_.clock_s, from_, next_.phase, handled_assembly(next_), reason});
    return next_;
  }

  ToolChangeState next_;
  Phase from_;
  TransitionLog* log_;
};

ToolChangeState advance(const ToolChangeState& s, const ChangerConfig& cfg, TransitionLog* log) {
  Transition tr(s, log);
  auto& n = tr.state();
  const auto& timing = cfg.timing;
  const bool aligned = s.attempt.alignment_error_mm <= cfg.alignment_tolerance_mm;
  switch (s.phase) {
    case Phase::AligningDock:
      return aligned ? tr.go(Phase::DockContact, timing.align_s) : tr.fault(FaultReason::Misalignment);
    case Phase::DockContact: {
      if (!retention_holds(cfg)) return tr.fault(FaultReason::Retention);
      dock_slot(n, *n.active_dock) = n.attached;
      n.attached.reset();
      return tr.go(Phase::DockedRetracting, timing.approach_s);
    }
    case Phase::DockedRetracting:
      n.active_dock.reset();
      return tr.go(Phase::Empty, timing.retract_s);
    case Phase::AligningNew:
      return aligned ? tr.go(Phase::Inserting, timing.transfer_s) : tr.fault(FaultReason::Misalignment);
    case Phase::Inserting:
      if (s.attempt.insertion_force_n > s.force_limit_n) return tr.fault(FaultReason::ForceLimit);
      return tr.go(Phase::Engaged, 0.0);
    case Phase::Engaged: {
      if (!extraction_succeeds(cfg)) return tr.fault(FaultReason::Extraction);
      auto& slot = dock_slot(n, *n.active_dock);
      n.attached = slot;
      slot.reset();
      return tr.go(Phase::SlidingUp, 0.0);
    }
    case Phase::SlidingUp:
      return tr.go(Phase::Complete, timing.slide_s);
    case Phase::Complete:
      n.active_dock.reset();
      return tr.go(Phase::Attached, 0.0);
    default:
      illegal(s, "Advance");
  }
}

}  // namespace

ToolChangeState apply(const ToolChangeState& s, const Event& e, const ChangerConfig& cfg,
                      TransitionLog* log) {
  if (s.phase == Phase::Faulted && e.kind != EventKind::Reset) illegal(s, "event other than Reset");

  switch (e.kind) {
    case EventKind::BeginDock: {
      if (s.phase != Phase::Attached) illegal(s, "BeginDock");
      Transition tr(s, log);
      if (dock_slot(tr.state(), e.dock)) throw Error(ErrorCode::DockOccupied, "dock '" + e.dock.value + "' is occupied");
      tr.state().active_dock = e.dock;
      tr.state().attempt = e.attempt;
      return tr.go(Phase::AligningDock, 0.0);
    }
    case EventKind::BeginUndock: {
      if (s.phase != Phase::Empty) illegal(s, "BeginUndock");
      Transition tr(s, log);
      if (!dock_slot(tr.state(), e.dock)) throw Error(ErrorCode::DockEmpty, "dock '" + e.dock.value + "' is empty");
      tr.state().active_dock = e.dock;
      tr.state().attempt = e.attempt;
      tr.state().force_limit_n = e.force_limit_n;
      return tr.go(Phase::AligningNew, 0.0);
    }
    case EventKind::Advance:
      return advance(s, cfg, log);
    case EventKind::InjectFault:
      return Transition(s, log).fault(e.injected);
    case EventKind::Reset:
      return reset(s, log);
  }
  illegal(s, "unknown event");
}

ToolChangeState dock(const ToolChangeState& s, const DockId& dock_id, const ChangeAttempt& attempt,
                     const ChangerConfig& cfg, TransitionLog* log) {
  if (s.phase != Phase::Attached) illegal(s, "dock");
  auto cur = apply(s, Event::begin_dock(dock_id, attempt), cfg, log);
  while (cur.phase != Phase::Empty && cur.phase != Phase::Faulted) cur = apply(cur, Event::advance(), cfg, log);
  return cur;
}

ToolChangeState undock(const ToolChangeState& s, const DockId& dock_id, const ChangeAttempt& attempt,
                       double force_limit_n, const ChangerConfig& cfg, TransitionLog* log) {
  if (s.phase != Phase::Empty) illegal(s, "undock");
  auto cur = apply(s, Event::begin_undock(dock_id, attempt, force_limit_n), cfg, log);
  while (cur.phase != Phase::Attached && cur.phase != Phase::Faulted) cur = apply(cur, Event::advance(), cfg, log);
  return cur;
}

ChangeOutcome full_change(const ToolChangeState& s, const DockId& park_dock, const DockId& fetch_dock,
                          const ChangeAttempt& dock_attempt, const ChangeAttempt& undock_attempt,
                          const ChangerConfig& cfg, TransitionLog* log) {
  cfg.validate();
  if (s.phase != Phase::Attached) illegal(s, "full_change");
  ChangeOutcome out;
  out.state = dock(s, park_dock, dock_attempt, cfg, log);
  if (out.state.phase != Phase::Faulted)
    out.state = undock(out.state, fetch_dock, undock_attempt, cfg.insertion_force_limit_n, cfg, log);
  out.elapsed_s = out.state.clock_s - s.clock_s;
  out.success = out.state.phase == Phase::Attached;
  return out;
}

ToolChangeState reset(const ToolChangeState& s, TransitionLog* log) {
  if (s.phase != Phase::Faulted)
    throw Error(ErrorCode::NotFaulted, "reset requires a Faulted state, got " + std::string(to_string(s.phase)));
  Transition tr(s, log);
  auto& n = tr.state();
  n.fault.reset();
  n.active_dock.reset();
  n.attempt = {};
  n.force_limit_n = 0.0;
  return tr.go(n.attached ? Phase::Attached : Phase::Empty, 0.0);
}

ChangeAttempt sample_attempt(const AttemptDistribution& d, Rng& rng) {
  ChangeAttempt a;
  a.alignment_error_mm = std::abs(rng.truncated_normal(0.0, d.alignment_sd_mm, 4.0));
  a.insertion_force_n = std::max(0.0, rng.truncated_normal(d.force_mean_n, d.force_sd_n, 4.0));
  return a;
}

}  // namespace bitgrip::toolchange
