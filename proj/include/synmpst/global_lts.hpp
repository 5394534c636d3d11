// Operational semantics of global types and materialisation of their LTS.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "synmpst/lts_graph.hpp"
#include "synmpst/syntax.hpp"

namespace synmpst {

/// All single-step transitions of g, without duplicates. Communications of
/// g's own prefix come first (in branch order), then out-of-order steps.
std::vector<std::pair<GlobalAction, GlobalType>> step(const GlobalType & g);

class StateCapExceeded : public std::runtime_error
{
 public:
  StateCapExceeded(std::size_t cap, std::size_t frontier);
  StateCapExceeded(std::size_t cap, std::size_t frontier, const std::string & what);
  std::size_t cap;
  std::size_t frontier;
};

struct GlobalLts
{
  std::vector<GlobalType> store;  // indexed by StateId
  TransitionGraph graph;
  std::size_t cap = 0;

  const GlobalType & state(StateId s) const { return store.at(s.value); }
  StateId initial() const { return graph.initial(); }
};

constexpr std::size_t default_state_cap = 10000;
/// Average term size per allowed state. Overtaking into a loop can grow terms
/// by one prefix per state, which would need quadratic memory before the
/// state cap is reached.
constexpr std::size_t term_nodes_per_state = 200;

/// Breadth-first closure of `step` from g. States are numbered in discovery
/// order, so the initial state is 0. Throws StateCapExceeded once more than
/// `cap` states, or more than cap * term_nodes_per_state term nodes in total,
/// would be stored.
GlobalLts build_lts(const GlobalType & g, std::size_t cap = default_state_cap);

std::string lts_to_dot(const GlobalLts & lts);
std::string lts_to_json(const GlobalLts & lts);

}  // namespace synmpst
