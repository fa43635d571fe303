#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bitgrip/rng.hpp"

namespace bitgrip::toolchange {

struct MagnetSpec {
  double length_mm = 50.0;
  double width_mm = 10.0;
  double thickness_mm = 3.0;
  double holding_force_n = 30.0;

  void validate() const;
  bool operator==(const MagnetSpec&) const = default;

  static MagnetSpec dock_default() { return {50.0, 10.0, 3.0, 30.0}; }
  static MagnetSpec coupling_default() { return {20.0, 10.0, 2.0, 10.0}; }
};

struct AssemblyId {
  std::string value;
  auto operator<=>(const AssemblyId&) const = default;
};

struct DockId {
  std::string value;
  auto operator<=>(const DockId&) const = default;
};

enum class Phase {
  Attached,
  AligningDock,
  DockContact,
  DockedRetracting,
  Empty,
  AligningNew,
  Inserting,
  Engaged,
  SlidingUp,
  Complete,
  Faulted,
};

enum class FaultReason { Misalignment, Retention, ForceLimit, Extraction, Injected };

std::string_view to_string(Phase p);
std::string_view to_string(FaultReason r);

struct Fault {
  FaultReason reason = FaultReason::Injected;
  Phase phase = Phase::Attached;
  bool operator==(const Fault&) const = default;
};

struct ChangeAttempt {
  double alignment_error_mm = 0.0;
  double insertion_force_n = 0.0;
  bool operator==(const ChangeAttempt&) const = default;
};

/// Seconds charged to each timed transition. The five parts sum to the
/// duration of one full change.
struct TimingProfile {
  double align_s = 8.0;     // AligningDock -> DockContact
  double approach_s = 8.0;  // DockContact -> DockedRetracting
  double retract_s = 8.0;   // DockedRetracting -> Empty
  double transfer_s = 8.0;  // AligningNew -> Inserting
  double slide_s = 8.0;     // SlidingUp -> Complete

  double total() const { return align_s + approach_s + retract_s + transfer_s + slide_s; }
  bool operator==(const TimingProfile&) const = default;
};

struct ChangerConfig {
  MagnetSpec dock_magnet = MagnetSpec::dock_default();
  MagnetSpec coupling_magnet = MagnetSpec::coupling_default();
  double alignment_tolerance_mm = 2.0;
  /// Fraction of dock holding force left while the assembly slides out.
  double sliding_factor = 0.2;
  double insertion_force_limit_n = 15.0;
  TimingProfile timing{};

  void validate() const;
  bool operator==(const ChangerConfig&) const = default;
};

/// Dock keeps the assembly when the arm retracts.
bool retention_holds(const ChangerConfig& cfg);
/// Coupling pulls the assembly off a dock whose grip is weakened by sliding.
bool extraction_succeeds(const ChangerConfig& cfg);

struct ToolChangeState {
  Phase phase = Phase::Attached;
  std::optional<AssemblyId> attached;
  std::map<DockId, std::optional<AssemblyId>> docks;
  std::optional<Fault> fault;
  /// Every assembly in the cell; ownership is checked against this.
  std::vector<AssemblyId> assemblies;

  std::optional<DockId> active_dock;
  ChangeAttempt attempt{};
  double force_limit_n = 0.0;
  double clock_s = 0.0;

  bool operator==(const ToolChangeState&) const = default;

  static ToolChangeState initial(std::optional<AssemblyId> attached,
                                 std::map<DockId, std::optional<AssemblyId>> docks);
};

/// Throws std::logic_error unless every known assembly sits in exactly one
/// place and nothing unknown appears.
void check_ownership(const ToolChangeState& s);

struct LogRecord {
  double timestamp_s = 0.0;
  Phase from = Phase::Attached;
  Phase to = Phase::Attached;
  std::optional<AssemblyId> assembly;
  std::optional<FaultReason> fault;
};

using TransitionLog = std::vector<LogRecord>;

/// "t=16.000 from=DockContact to=DockedRetracting assembly=belt_a fault=-"
std::string format_log_line(const LogRecord& r);

enum class EventKind { BeginDock, BeginUndock, Advance, InjectFault, Reset };

struct Event {
  EventKind kind = EventKind::Advance;
  DockId dock{};
  ChangeAttempt attempt{};
  double force_limit_n = 0.0;
  FaultReason injected = FaultReason::Injected;

  static Event begin_dock(DockId d, ChangeAttempt a) { return {EventKind::BeginDock, std::move(d), a, 0.0}; }
  static Event begin_undock(DockId d, ChangeAttempt a, double limit) {
    return {EventKind::BeginUndock, std::move(d), a, limit};
  }
  static Event advance() { return {}; }
  static Event inject(FaultReason r) { return {EventKind::InjectFault, {}, {}, 0.0, r}; }
  static Event reset() { return {EventKind::Reset}; }
};

/// Single transition. Events outside the table throw IllegalTransition and
/// leave the input untouched; guard failures move to Faulted.
ToolChangeState apply(const ToolChangeState& s, const Event& e, const ChangerConfig& cfg,
                      TransitionLog* log = nullptr);

/// Attached -> AligningDock -> DockContact -> DockedRetracting -> Empty.
ToolChangeState dock(const ToolChangeState& s, const DockId& dock_id, const ChangeAttempt& attempt,
                     const ChangerConfig& cfg, TransitionLog* log = nullptr);

/// Empty -> AligningNew -> Inserting -> Engaged -> SlidingUp -> Complete -> Attached.
ToolChangeState undock(const ToolChangeState& s, const DockId& dock_id, const ChangeAttempt& attempt,
                       double force_limit_n, const ChangerConfig& cfg, TransitionLog* log = nullptr);

struct ChangeOutcome {
  ToolChangeState state;
  double elapsed_s = 0.0;
  bool success = false;
};

/// Parks the mounted assembly in park_dock, then fetches from fetch_dock.
/// A fault at any phase stops the sequence; elapsed covers what ran.
ChangeOutcome full_change(const ToolChangeState& s, const DockId& park_dock, const DockId& fetch_dock,
                          const ChangeAttempt& dock_attempt, const ChangeAttempt& undock_attempt,
                          const ChangerConfig& cfg, TransitionLog* log = nullptr);

/// Leaves Faulted for the ownership configuration that still holds.
ToolChangeState reset(const ToolChangeState& s, TransitionLog* log = nullptr);

/// Spread of arm positioning and insertion force in simulated attempts.
struct AttemptDistribution {
  double alignment_sd_mm = 0.4;
  double force_mean_n = 5.0;
  double force_sd_n = 1.0;
  bool operator==(const AttemptDistribution&) const = default;
};

/// Half-normal alignment error and normal force, both truncated at 4σ.
ChangeAttempt sample_attempt(const AttemptDistribution& d, Rng& rng);

}  // namespace bitgrip::toolchange
