// Finite labelled transition graphs over global actions, with the
// role-filtered step and reachability relations used by the type checker.

#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "synmpst/syntax.hpp"

namespace synmpst {

struct StateId
{
  std::uint32_t value = 0;
  friend auto operator<=>(const StateId &, const StateId &) = default;
};

struct Transition
{
  StateId from;
  GlobalAction action;
  StateId to;
  friend auto operator<=>(const Transition &, const Transition &) = default;
};

struct Step
{
  GlobalAction action;
  StateId target;
  friend auto operator<=>(const Step &, const Step &) = default;
};

class TransitionGraph
{
 public:
  TransitionGraph() = default;
  /// Transitions are deduplicated and sorted per source state.
  TransitionGraph(std::size_t num_states,
                  StateId initial,
                  std::vector<Transition> transitions);

  std::size_t num_states() const { return out_.size(); }
  StateId initial() const { return initial_; }
  const std::vector<Step> & out(StateId s) const { return out_.at(s.value); }
  const std::vector<Transition> & transitions() const { return transitions_; }
  bool contains(StateId s) const { return s.value < out_.size(); }

  /// Steps of s in which every role of `roles` participates.
  std::vector<Step> step_with(StateId s, const RoleSet & roles) const;
  /// Steps of s in which no role of `roles` participates.
  std::vector<Step> step_without(StateId s, const RoleSet & roles) const;
  /// step_without(s, roles) if no role of `roles` can step at s, else empty.
  std::vector<Step> strong_step_without(StateId s, const RoleSet & roles) const;

  /// Reflexive-transitive closures, sorted by state id.
  std::vector<StateId> reach_without(StateId s, const RoleSet & roles) const;
  std::vector<StateId> reach_strong_without(StateId s, const RoleSet & roles) const;

  bool enabled(StateId s, const Role & r) const;
  /// Some state reachable from s enables r.
  bool active(StateId s, const Role & r) const;

  /// Roles occurring in any transition.
  RoleSet roles() const;

 private:
  StateId initial_;
  std::vector<std::vector<Step>> out_;
  std::vector<Transition> transitions_;
};

}  // namespace synmpst
