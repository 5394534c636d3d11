#include "synmpst/mlts.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include <json.hpp>

namespace synmpst {

Mlts as_mlts(const GlobalLts & lts)
{
  Mlts m;
  for (std::size_t i = 0; i < lts.store.size(); ++i)
    m.state_names.push_back("s" + std::to_string(i));
  m.graph = lts.graph;
  return m;
}

bool receiver_disjoint(const GlobalAction & a1, const GlobalAction & a2)
{
  return !a2.involves(a1.receiver) && !a1.involves(a2.receiver);
}

std::string_view to_string(WbCondition c)
{
  switch (c) {
    case WbCondition::SenderDeterminacy: return "sender-determinacy";
    case WbCondition::Determinism: return "determinism";
    case WbCondition::ConditionalCommutativity: return "conditional-commutativity";
    case WbCondition::Diamond: return "diamond";
  }
  return "?";
}

namespace {

constexpr std::size_t num_conditions = 4;
using Buckets = std::array<std::vector<WbViolation>, num_conditions>;

bool same_pair(const GlobalAction & a, const GlobalAction & b)
{
  return a.sender == b.sender && a.receiver == b.receiver;
}

bool disjoint_roles(const GlobalAction & a, const GlobalAction & b)
{
  return !a.involves(b.sender) && !a.involves(b.receiver);
}

void push(Buckets & out, WbViolation v)
{
  auto & bucket = out[static_cast<std::size_t>(v.condition)];
  if (bucket.size() < max_violations_per_condition) bucket.push_back(std::move(v));
}

// Binary-search lookups into the sorted per-state step lists.
class SuccessorIndex
{
 public:
  explicit SuccessorIndex(const TransitionGraph & g) : g_(g) {}

  bool has(StateId from, const GlobalAction & a, StateId to) const
  {
    const auto & out = g_.out(from);
    auto it = std::lower_bound(out.begin(), out.end(), Step{a, to});
    return it != out.end() && it->action == a && it->target == to;
  }

  // Targets of `from` under `a`, as a contiguous range of the sorted list.
  std::pair<std::vector<Step>::const_iterator, std::vector<Step>::const_iterator>
  targets(StateId from, const GlobalAction & a) const
  {
    const auto & out = g_.out(from);
    auto lo = std::lower_bound(out.begin(), out.end(), Step{a, StateId{0}});
    auto hi = lo;
    while (hi != out.end() && hi->action == a) ++hi;
    return {lo, hi};
  }

 private:
  const TransitionGraph & g_;
};

void check_state(const TransitionGraph & g,
                 const SuccessorIndex & idx,
                 StateId b,
                 Buckets & out)
{
  const auto & steps = g.out(b);

  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = i + 1; j < steps.size(); ++j) {
      const auto & a1 = steps[i].action;
      const auto & a2 = steps[j].action;
      if (!receiver_disjoint(a1, a2) && !same_pair(a1, a2))
        push(out, {WbCondition::SenderDeterminacy, {b}, {a1, a2}});
    }

  // steps are sorted, so equal actions are adjacent
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    if (steps[i].action == steps[i + 1].action)
      push(out, {WbCondition::Determinism,
                 {b, steps[i].target, steps[i + 1].target},
                 {steps[i].action}});

  for (const auto & first : steps) {
    for (const auto & second : g.out(first.target)) {
      const auto & a1 = first.action;
      const auto & a2 = second.action;
      if (!disjoint_roles(a1, a2)) continue;
      bool pair_at_b = false;
      for (const auto & s : steps) pair_at_b = pair_at_b || same_pair(s.action, a2);
      if (!pair_at_b) continue;
      bool closes = false;
      auto [lo, hi] = idx.targets(b, a2);
      for (auto it = lo; it != hi && !closes; ++it)
        closes = idx.has(it->target, a1, second.target);
      if (!closes)
        push(out, {WbCondition::ConditionalCommutativity,
                   {b, first.target, second.target},
                   {a1, a2}});
    }
  }

  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = i + 1; j < steps.size(); ++j) {
      const auto & [a1, b1] = steps[i];
      const auto & [a2, b2] = steps[j];
      if (!receiver_disjoint(a1, a2)) continue;
      bool closes = false;
      auto [lo, hi] = idx.targets(b1, a2);
      for (auto it = lo; it != hi && !closes; ++it)
        closes = idx.has(b2, a1, it->target);
      if (!closes) push(out, {WbCondition::Diamond, {b, b1, b2}, {a1, a2}});
    }
}

std::vector<WbViolation> flatten(Buckets & buckets)
{
  std::vector<WbViolation> out;
  for (auto & bucket : buckets)
    for (auto & v : bucket) out.push_back(std::move(v));
  return out;
}

}  // namespace

std::vector<WbViolation> check_well_behaved(const Mlts & m)
{
  const auto & g = m.graph;
  SuccessorIndex idx(g);
  const long n = static_cast<long>(g.num_states());
  std::vector<Buckets> per_state(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 16)
  for (long s = 0; s < n; ++s)
    check_state(g, idx, StateId{static_cast<std::uint32_t>(s)},
                per_state[static_cast<std::size_t>(s)]);

  Buckets merged;
  for (auto & buckets : per_state)
    for (auto & bucket : buckets)
      for (auto & v : bucket) push(merged, std::move(v));
  return flatten(merged);
}

// The reference formulation works on the flat transition list with linear
// scans only; it shares no helpers with the parallel kernel beyond
// receiver_disjoint.
std::vector<WbViolation> check_well_behaved_serial(const Mlts & m)
{
  const auto & all = m.graph.transitions();
  auto outgoing = [&](StateId b) {
    std::vector<Transition> out;
    for (const auto & t : all)
      if (t.from == b) out.push_back(t);
    return out;
  };
  auto exists = [&](StateId from, const GlobalAction & a, StateId to) {
    for (const auto & t : all)
      if (t.from == from && t.action == a && t.to == to) return true;
    return false;
  };

  Buckets out;
  for (std::uint32_t s = 0; s < m.graph.num_states(); ++s) {
    StateId b{s};
    auto steps = outgoing(b);

    for (std::size_t i = 0; i < steps.size(); ++i)
      for (std::size_t j = i + 1; j < steps.size(); ++j) {
        const auto & a1 = steps[i].action;
        const auto & a2 = steps[j].action;
        bool fixed_sender = a1.sender == a2.sender && a1.receiver == a2.receiver;
        if (!receiver_disjoint(a1, a2) && !fixed_sender)
          push(out, {WbCondition::SenderDeterminacy, {b}, {a1, a2}});
      }

    // one witness per pair of consecutive targets of the same action
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
      if (steps[i].action == steps[i + 1].action && steps[i].to != steps[i + 1].to)
        push(out, {WbCondition::Determinism,
                   {b, steps[i].to, steps[i + 1].to},
                   {steps[i].action}});

    for (const auto & t1 : steps)
      for (const auto & t2 : outgoing(t1.to)) {
        const auto & rs = t1.action;
        const auto & pq = t2.action;
        if (pq.involves(rs.sender) || pq.involves(rs.receiver)) continue;
        bool pair_at_b = false;
        for (const auto & t : steps)
          if (t.action.sender == pq.sender && t.action.receiver == pq.receiver)
            pair_at_b = true;
        if (!pair_at_b) continue;
        bool closes = false;
        for (const auto & t : steps)
          if (t.action == pq && exists(t.to, rs, t2.to)) closes = true;
        if (!closes)
          push(out, {WbCondition::ConditionalCommutativity, {b, t1.to, t2.to}, {rs, pq}});
      }

    for (std::size_t i = 0; i < steps.size(); ++i)
      for (std::size_t j = i + 1; j < steps.size(); ++j) {
        const auto & t1 = steps[i];
        const auto & t2 = steps[j];
        if (!receiver_disjoint(t1.action, t2.action)) continue;
        bool closes = false;
        for (const auto & u : outgoing(t1.to))
          if (u.action == t2.action && exists(t2.to, t1.action, u.to)) closes = true;
        if (!closes)
          push(out, {WbCondition::Diamond, {b, t1.to, t2.to}, {t1.action, t2.action}});
      }
  }
  return flatten(out);
}

bool replay_violation(const Mlts & m, const WbViolation & v)
{
  const auto & g = m.graph;
  for (StateId s : v.states)
    if (!g.contains(s)) return false;
  auto has = [&](StateId from, const GlobalAction & a, StateId to) {
    for (const auto & step : g.out(from))
      if (step.action == a && step.target == to) return true;
    return false;
  };
  auto has_action = [&](StateId from, const GlobalAction & a) {
    for (const auto & step : g.out(from))
      if (step.action == a) return true;
    return false;
  };

  switch (v.condition) {
    case WbCondition::SenderDeterminacy: {
      if (v.states.size() != 1 || v.actions.size() != 2) return false;
      const auto & [a1, a2] = std::tie(v.actions[0], v.actions[1]);
      return has_action(v.states[0], a1) && has_action(v.states[0], a2)
             && !receiver_disjoint(a1, a2) && !same_pair(a1, a2);
    }
    case WbCondition::Determinism: {
      if (v.states.size() != 3 || v.actions.size() != 1) return false;
      return v.states[1] != v.states[2] && has(v.states[0], v.actions[0], v.states[1])
             && has(v.states[0], v.actions[0], v.states[2]);
    }
    case WbCondition::ConditionalCommutativity: {
      if (v.states.size() != 3 || v.actions.size() != 2) return false;
      StateId b = v.states[0], b1 = v.states[1], b_end = v.states[2];
      const auto & rs = v.actions[0];
      const auto & pq = v.actions[1];
      if (!has(b, rs, b1) || !has(b1, pq, b_end) || !disjoint_roles(rs, pq))
        return false;
      bool pair_at_b = false;
      for (const auto & step : g.out(b))
        pair_at_b = pair_at_b || same_pair(step.action, pq);
      if (!pair_at_b) return false;
      for (const auto & step : g.out(b))
        if (step.action == pq && has(step.target, rs, b_end)) return false;
      return true;
    }
    case WbCondition::Diamond: {
      if (v.states.size() != 3 || v.actions.size() != 2) return false;
      StateId b = v.states[0], b1 = v.states[1], b2 = v.states[2];
      const auto & a1 = v.actions[0];
      const auto & a2 = v.actions[1];
      if (!has(b, a1, b1) || !has(b, a2, b2) || !receiver_disjoint(a1, a2))
        return false;
      for (const auto & step : g.out(b1))
        if (step.action == a2 && has(b2, a1, step.target)) return false;
      return true;
    }
  }
  return false;
}

std::string violation_to_string(const Mlts & m, const WbViolation & v)
{
  std::string out = std::string(to_string(v.condition)) + " at";
  for (StateId s : v.states) out += " " + m.name(s);
  out += ":";
  for (const auto & a : v.actions) out += " " + to_string(a);
  return out;
}

std::string violations_to_json(const Mlts & m, const std::vector<WbViolation> & vs)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & v : vs) {
    nlohmann::ordered_json j;
    j["condition"] = std::string(to_string(v.condition));
    auto states = nlohmann::ordered_json::array();
    for (StateId s : v.states) states.push_back(m.name(s));
    j["states"] = states;
    auto actions = nlohmann::ordered_json::array();
    for (const auto & a : v.actions) actions.push_back(to_string(a));
    j["actions"] = actions;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace synmpst
