// Executable semantics of sessions: evaluation, synchronous communication,
// seeded simulation, and bounded exhaustive exploration.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "synmpst/mlts.hpp"
#include "synmpst/syntax.hpp"

namespace synmpst {

struct TauAction
{
  Role role;
  friend auto operator<=>(const TauAction &, const TauAction &) = default;
};

using RuntimeAction = std::variant<GlobalAction, TauAction>;

std::string to_string(const RuntimeAction & a);

class EvalError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Big-step evaluation of a closed expression.
Value eval(const Expr & e);

struct SessionStep
{
  RuntimeAction action;
  std::optional<Value> value;  // communicated value, for Comm steps
  Session next;
};

/// Every step the session can take, communications first (by sender), then
/// internal steps (by role).
std::vector<SessionStep> session_step(const Session & c);

/// All processes have terminated.
bool is_final(const Session & c);

struct Trace
{
  Session initial;
  std::vector<RuntimeAction> actions;
  std::vector<std::optional<Value>> values;  // parallel to actions
  Session terminal;
};

/// Picks uniformly among enabled steps with a generator seeded by `seed`
/// until no step is possible or `max_steps` steps were taken.
Trace run(const Session & c, std::uint64_t seed, std::size_t max_steps);

/// Applies the actions in order; nothing if some action is not enabled.
std::optional<Session> replay(const Session & initial,
                              const std::vector<RuntimeAction> & actions);

/// Index of the first communication the MLTS does not allow, if any.
/// Internal steps leave the MLTS state unchanged.
std::optional<std::size_t> check_trace(const Mlts & m, const Trace & trace);

struct StuckConfig
{
  Session session;
  StateId state;
};

struct PreservationBreak
{
  Session session;
  GlobalAction action;
  StateId state;
};

struct ExploreReport
{
  std::size_t configs_visited = 0;
  std::size_t max_depth_reached = 0;
  bool truncated = false;  // some configuration at the depth bound could still step
  std::vector<StuckConfig> stuck_non_final;
  std::vector<StuckConfig> tau_cycles;  // one configuration on each cycle
  std::vector<PreservationBreak> preservation_breaks;

  bool sound() const
  {
    return stuck_non_final.empty() && tau_cycles.empty()
           && preservation_breaks.empty();
  }
};

/// Breadth-first search over pairs of session and MLTS state.
ExploreReport explore(const Mlts & m, const Session & c, std::size_t max_depth);

std::string trace_to_jsonl(const Trace & trace);
/// Message-sequence rendering, one communication per line.
std::string trace_to_text(const Trace & trace);
std::string session_to_string(const Session & c);

}  // namespace synmpst
