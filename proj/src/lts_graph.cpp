#include "synmpst/lts_graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace synmpst {

TransitionGraph::TransitionGraph(std::size_t num_states,
                                 StateId initial,
                                 std::vector<Transition> transitions)
    : initial_(initial), out_(num_states)
{
  if (num_states == 0 || initial.value >= num_states)
    throw std::invalid_argument("initial state out of range");
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()),
                    transitions.end());
  for (const auto & t : transitions) {
    if (t.from.value >= num_states || t.to.value >= num_states)
      throw std::invalid_argument("transition endpoint out of range");
    out_[t.from.value].push_back({t.action, t.to});
  }
  transitions_ = std::move(transitions);
}

namespace {

bool participates_all(const GlobalAction & a, const RoleSet & roles)
{
  return std::all_of(roles.begin(), roles.end(),
                     [&](const Role & r) { return a.involves(r); });
}

bool participates_none(const GlobalAction & a, const RoleSet & roles)
{
  return !roles.count(a.sender) && !roles.count(a.receiver);
}

template <class Next>
std::vector<StateId> closure(std::size_t n, StateId s, Next next)
{
  std::vector<bool> seen(n, false);
  std::deque<StateId> queue{s};
  seen[s.value] = true;
  std::vector<StateId> out;
  while (!queue.empty()) {
    StateId cur = queue.front();
    queue.pop_front();
    out.push_back(cur);
    for (const auto & step : next(cur)) {
      if (!seen[step.target.value]) {
        seen[step.target.value] = true;
        queue.push_back(step.target);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Step> TransitionGraph::step_with(StateId s, const RoleSet & roles) const
{
  std::vector<Step> out;
  for (const auto & step : out_.at(s.value))
    if (participates_all(step.action, roles)) out.push_back(step);
  return out;
}

std::vector<Step> TransitionGraph::step_without(StateId s, const RoleSet & roles) const
{
  std::vector<Step> out;
  for (const auto & step : out_.at(s.value))
    if (participates_none(step.action, roles)) out.push_back(step);
  return out;
}

std::vector<Step> TransitionGraph::strong_step_without(StateId s,
                                                       const RoleSet & roles) const
{
  if (!step_with(s, roles).empty()) return {};
  return step_without(s, roles);
}

std::vector<StateId> TransitionGraph::reach_without(StateId s,
                                                    const RoleSet & roles) const
{
  return closure(out_.size(), s,
                 [&](StateId cur) { return step_without(cur, roles); });
}

std::vector<StateId> TransitionGraph::reach_strong_without(StateId s,
                                                           const RoleSet & roles) const
{
  return closure(out_.size(), s,
                 [&](StateId cur) { return strong_step_without(cur, roles); });
}

bool TransitionGraph::enabled(StateId s, const Role & r) const
{
  return !step_with(s, {r}).empty();
}

bool TransitionGraph::active(StateId s, const Role & r) const
{
  for (StateId t : closure(out_.size(), s, [&](StateId cur) { return out(cur); }))
    if (enabled(t, r)) return true;
  return false;
}

RoleSet TransitionGraph::roles() const
{
  RoleSet out;
  for (const auto & t : transitions_) {
    out.insert(t.action.sender);
    out.insert(t.action.receiver);
  }
  return out;
}

}  // namespace synmpst
