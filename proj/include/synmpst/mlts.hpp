// Explicit multiparty LTSs and the well-behavedness conditions that make
// them usable as type specifications.

#pragma once

#include <string>
#include <vector>

#include "synmpst/global_lts.hpp"
#include "synmpst/lts_graph.hpp"

namespace synmpst {

struct Mlts
{
  std::vector<std::string> state_names;  // indexed by StateId
  TransitionGraph graph;

  StateId initial() const { return graph.initial(); }
  const std::string & name(StateId s) const { return state_names.at(s.value); }
};

/// Names the states of a global LTS "s0", "s1", ... in id order.
Mlts as_mlts(const GlobalLts & lts);

/// Neither receiver takes part in the other action.
bool receiver_disjoint(const GlobalAction & a1, const GlobalAction & a2);

enum class WbCondition
{
  SenderDeterminacy,
  Determinism,
  ConditionalCommutativity,
  Diamond
};

std::string_view to_string(WbCondition c);

// Witness shapes:
//   SenderDeterminacy         states {B}            actions {a1, a2}
//   Determinism               states {B, B1, B2}    actions {a}
//   ConditionalCommutativity  states {B, B1, B'}    actions {r->s, p->q}
//   Diamond                   states {B, B1, B2}    actions {a1, a2}
struct WbViolation
{
  WbCondition condition;
  std::vector<StateId> states;
  std::vector<GlobalAction> actions;

  friend bool operator==(const WbViolation &, const WbViolation &) = default;
};

constexpr std::size_t max_violations_per_condition = 50;

/// Exhaustive check, parallel over states. Violations are ordered by
/// condition, then by state, and capped per condition.
std::vector<WbViolation> check_well_behaved(const Mlts & m);

/// Single-threaded reference implementation with the same output contract.
std::vector<WbViolation> check_well_behaved_serial(const Mlts & m);

/// True iff the witness, checked against m, genuinely falsifies its condition.
bool replay_violation(const Mlts & m, const WbViolation & v);

std::string violation_to_string(const Mlts & m, const WbViolation & v);
std::string violations_to_json(const Mlts & m, const std::vector<WbViolation> & vs);

}  // namespace synmpst
