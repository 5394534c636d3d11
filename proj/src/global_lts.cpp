#include "synmpst/global_lts.hpp"

#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace synmpst {

namespace {

using StepList = std::vector<std::pair<GlobalAction, GlobalType>>;

void add_unique(StepList & out, GlobalAction a, GlobalType g)
{
  for (const auto & [b, h] : out)
    if (b == a && h == g) return;
  out.emplace_back(std::move(a), std::move(g));
}

// Derivations are searched depth first. A term that is already being stepped
// further up contributes nothing: any derivation through it would be cyclic
// and could never bottom out in a prefix communication.
StepList step_in(const GlobalType & g, std::vector<GlobalType> & in_progress)
{
  for (const auto & t : in_progress)
    if (t == g) return {};
  in_progress.push_back(g);
  StepList out;

  if (auto c = g.as<GComm>()) {
    for (const auto & b : c->branches)
      add_unique(out, GlobalAction{c->sender, c->receiver, b.label, b.payload},
                 b.cont);

    // Out-of-order steps: an action independent of the prefix that every
    // branch can take.
    std::vector<std::map<GlobalAction, std::vector<GlobalType>>> per_branch;
    for (const auto & b : c->branches) {
      std::map<GlobalAction, std::vector<GlobalType>> m;
      for (auto & [a, target] : step_in(b.cont, in_progress))
        if (!a.involves(c->sender) && !a.involves(c->receiver))
          m[a].push_back(std::move(target));
      per_branch.push_back(std::move(m));
    }
    for (const auto & [a, first_targets] : per_branch.front()) {
      bool everywhere = true;
      for (std::size_t i = 1; i < per_branch.size(); ++i)
        everywhere = everywhere && per_branch[i].count(a);
      if (!everywhere) continue;
      // one result per choice of target in each branch
      std::vector<std::vector<GlobalType>> combos{{}};
      for (std::size_t i = 0; i < per_branch.size(); ++i) {
        std::vector<std::vector<GlobalType>> next;
        for (const auto & prefix : combos)
          for (const auto & t : per_branch[i].at(a)) {
            auto extended = prefix;
            extended.push_back(t);
            next.push_back(std::move(extended));
          }
        combos = std::move(next);
      }
      for (const auto & combo : combos) {
        std::vector<GBranch> branches;
        for (std::size_t i = 0; i < combo.size(); ++i)
          branches.push_back(
              {c->branches[i].label, c->branches[i].payload, combo[i]});
        add_unique(out, a, g_comm(c->sender, c->receiver, std::move(branches), g.span()));
      }
    }
  }
  else if (auto m = g.as<GMu>()) {
    out = step_in(substitute_global(m->body, m->var, g), in_progress);
  }
  else if (auto p = g.as<GPar>()) {
    for (auto & [a, l] : step_in(p->left, in_progress))
      add_unique(out, a, g_par(l, p->right, g.span()));
    for (auto & [a, r] : step_in(p->right, in_progress))
      add_unique(out, a, g_par(p->left, r, g.span()));
  }

  in_progress.pop_back();
  return out;
}

}  // namespace

std::vector<std::pair<GlobalAction, GlobalType>> step(const GlobalType & g)
{
  std::vector<GlobalType> in_progress;
  return step_in(g, in_progress);
}

StateCapExceeded::StateCapExceeded(std::size_t cap, std::size_t frontier)
    : std::runtime_error("state cap of " + std::to_string(cap)
                         + " exceeded with " + std::to_string(frontier)
                         + " states still on the frontier"),
      cap(cap),
      frontier(frontier)
{
}

StateCapExceeded::StateCapExceeded(std::size_t cap, std::size_t frontier,
                                   const std::string & what)
    : std::runtime_error(what), cap(cap), frontier(frontier)
{
}

namespace {

std::size_t term_nodes(const GlobalType & g)
{
  if (auto c = g.as<GComm>()) {
    std::size_t n = 1;
    for (const auto & b : c->branches) n += term_nodes(b.cont);
    return n;
  }
  if (auto m = g.as<GMu>()) return 1 + term_nodes(m->body);
  if (auto p = g.as<GPar>()) return 1 + term_nodes(p->left) + term_nodes(p->right);
  return 1;
}

}  // namespace

GlobalLts build_lts(const GlobalType & g, std::size_t cap)
{
  GlobalLts lts;
  lts.cap = cap;
  std::unordered_map<GlobalType, StateId, GlobalTypeHash> ids;
  std::vector<Transition> transitions;
  std::deque<StateId> frontier;
  const std::size_t node_budget = cap * term_nodes_per_state;
  std::size_t nodes = 0;

  auto intern = [&](const GlobalType & t) {
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    if (lts.store.size() >= cap) throw StateCapExceeded(cap, frontier.size());
    nodes += term_nodes(t);
    if (nodes > node_budget)
      throw StateCapExceeded(cap, frontier.size(),
                             "terms of the first " + std::to_string(lts.store.size())
                                 + " states exceed " + std::to_string(node_budget)
                                 + " nodes; overtaking does not settle within the state cap of "
                                 + std::to_string(cap));
    StateId id{static_cast<std::uint32_t>(lts.store.size())};
    lts.store.push_back(t);
    ids.emplace(t, id);
    frontier.push_back(id);
    return id;
  };

  intern(g);
  while (!frontier.empty()) {
    StateId s = frontier.front();
    frontier.pop_front();
    GlobalType term = lts.store[s.value];
    for (const auto & [a, target] : step(term))
      transitions.push_back({s, a, intern(target)});
  }
  lts.graph = TransitionGraph(lts.store.size(), StateId{0}, std::move(transitions));
  return lts;
}

namespace {

std::string dot_escape(const std::string & s)
{
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string lts_to_dot(const GlobalLts & lts)
{
  std::ostringstream out;
  out << "digraph lts {\n";
  out << "  node [shape=box];\n";
  for (std::size_t i = 0; i < lts.store.size(); ++i) {
    out << "  s" << i << " [label=\"s" << i << ": "
        << dot_escape(to_string(lts.store[i])) << "\"";
    if (i == lts.initial().value) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto & t : lts.graph.transitions())
    out << "  s" << t.from.value << " -> s" << t.to.value << " [label=\""
        << dot_escape(to_string(t.action)) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string lts_to_json(const GlobalLts & lts)
{
  nlohmann::ordered_json j;
  j["initial"] = "s" + std::to_string(lts.initial().value);
  auto states = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < lts.store.size(); ++i)
    states.push_back({{"id", "s" + std::to_string(i)},
                      {"term", to_string(lts.store[i])}});
  j["states"] = states;
  auto transitions = nlohmann::ordered_json::array();
  for (const auto & t : lts.graph.transitions())
    transitions.push_back({{"from", "s" + std::to_string(t.from.value)},
                           {"to", "s" + std::to_string(t.to.value)},
                           {"sender", t.action.sender.name},
                           {"receiver", t.action.receiver.name},
                           {"label", t.action.label.name},
                           {"payload", std::string(to_string(t.action.payload))}});
  j["transitions"] = transitions;
  return j.dump(2) + "\n";
}

}  // namespace synmpst
