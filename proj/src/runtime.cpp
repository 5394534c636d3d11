#include "synmpst/runtime.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace synmpst {

std::string to_string(const RuntimeAction & a)
{
  if (auto g = std::get_if<GlobalAction>(&a)) return to_string(*g);
  return "tau(" + std::get<TauAction>(a).role.name + ")";
}

Value eval(const Expr & e)
{
  if (auto lit = e.as<ELit>()) return lit->value;
  if (auto var = e.as<EVar>()) throw EvalError("free variable " + var->name);
  const auto & bin = *e.as<EBinary>();
  Value l = eval(bin.lhs);
  Value r = eval(bin.rhs);
  if (bin.op == BinaryOp::Eq) return Value::boolean(l == r);
  if (l.type == PayloadType::Nat && r.type == PayloadType::Nat) {
    auto a = std::get<std::uint64_t>(l.data), b = std::get<std::uint64_t>(r.data);
    return Value::nat(bin.op == BinaryOp::Add ? a + b : a * b);
  }
  if (l.type == PayloadType::Int && r.type == PayloadType::Int) {
    // wrap on overflow instead of invoking undefined behaviour
    auto a = static_cast<std::uint64_t>(std::get<std::int64_t>(l.data));
    auto b = static_cast<std::uint64_t>(std::get<std::int64_t>(r.data));
    return Value::integer(
        static_cast<std::int64_t>(bin.op == BinaryOp::Add ? a + b : a * b));
  }
  throw EvalError("operands of " + to_string(e) + " have mismatched types");
}

namespace {

std::optional<Value> try_eval(const Expr & e)
{
  try {
    return eval(e);
  }
  catch (const EvalError &) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<SessionStep> session_step(const Session & c)
{
  std::vector<SessionStep> out;

  for (const auto & [p, proc] : c) {
    auto send = proc.as<PSend>();
    if (!send) continue;
    auto it = c.find(send->to);
    if (it == c.end() || send->to == p) continue;
    auto recv = it->second.as<PRecv>();
    if (!recv || recv->from != p) continue;
    for (const auto & branch : recv->branches) {
      if (branch.label != send->label) continue;
      auto v = try_eval(send->payload);
      if (!v) break;
      Session next = c;
      next[p] = send->cont;
      next[send->to] = substitute_process_val(branch.cont, branch.binder, *v);
      out.push_back({GlobalAction{p, send->to, send->label, branch.annot}, v,
                     std::move(next)});
      break;
    }
  }

  for (const auto & [r, proc] : c) {
    std::optional<Process> next_proc;
    if (auto let = proc.as<PLet>()) {
      if (auto v = try_eval(let->rhs))
        next_proc = substitute_process_val(let->cont, let->binder, *v);
    }
    else if (auto cond = proc.as<PIf>()) {
      auto v = try_eval(cond->cond);
      if (v && v->type == PayloadType::Bool)
        next_proc = std::get<bool>(v->data) ? cond->then_branch : cond->else_branch;
    }
    else if (auto rec = proc.as<PRec>()) {
      next_proc = substitute_process_rec(rec->body, rec->var, proc);
    }
    if (!next_proc) continue;
    Session next = c;
    next[r] = *next_proc;
    out.push_back({TauAction{r}, std::nullopt, std::move(next)});
  }
  return out;
}

bool is_final(const Session & c)
{
  for (const auto & [r, p] : c)
    if (!p.is_end()) return false;
  return true;
}

Trace run(const Session & c, std::uint64_t seed, std::size_t max_steps)
{
  std::mt19937_64 rng(seed);
  Trace trace{c, {}, {}, c};
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto steps = session_step(trace.terminal);
    if (steps.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
    auto & chosen = steps[pick(rng)];
    trace.actions.push_back(chosen.action);
    trace.values.push_back(chosen.value);
    trace.terminal = std::move(chosen.next);
  }
  return trace;
}

std::optional<Session> replay(const Session & initial,
                              const std::vector<RuntimeAction> & actions)
{
  Session cur = initial;
  for (const auto & a : actions) {
    bool found = false;
    for (auto & step : session_step(cur))
      if (step.action == a) {
        cur = std::move(step.next);
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  return cur;
}

std::optional<std::size_t> check_trace(const Mlts & m, const Trace & trace)
{
  StateId s = m.initial();
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    auto g = std::get_if<GlobalAction>(&trace.actions[i]);
    if (!g) continue;
    bool found = false;
    for (const auto & step : m.graph.out(s))
      if (step.action == *g) {
        s = step.target;
        found = true;
        break;
      }
    if (!found) return i;
  }
  return std::nullopt;
}

namespace {

struct Config
{
  Session session;
  StateId state;
  friend bool operator==(const Config &, const Config &) = default;
};

struct ConfigHash
{
  std::size_t operator()(const Config & c) const
  {
    return hash_combine(hash_session(c.session), c.state.value);
  }
};

}  // namespace

ExploreReport explore(const Mlts & m, const Session & c, std::size_t max_depth)
{
  ExploreReport report;
  std::vector<Config> configs;
  std::vector<std::size_t> depth;
  std::vector<std::vector<std::size_t>> tau_edges;
  std::unordered_map<Config, std::size_t, ConfigHash> ids;
  std::deque<std::size_t> queue;

  auto intern = [&](Config cfg, std::size_t d) {
    auto it = ids.find(cfg);
    if (it != ids.end()) return it->second;
    std::size_t id = configs.size();
    ids.emplace(cfg, id);
    configs.push_back(std::move(cfg));
    depth.push_back(d);
    tau_edges.emplace_back();
    queue.push_back(id);
    report.max_depth_reached = std::max(report.max_depth_reached, d);
    return id;
  };

  intern(Config{c, m.initial()}, 0);
  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    Config cur = configs[id];
    auto steps = session_step(cur.session);
    if (steps.empty()) {
      if (!is_final(cur.session)) report.stuck_non_final.push_back({cur.session, cur.state});
      continue;
    }
    if (depth[id] >= max_depth) {
      report.truncated = true;
      continue;
    }
    for (auto & step : steps) {
      if (auto g = std::get_if<GlobalAction>(&step.action)) {
        bool matched = false;
        for (const auto & t : m.graph.out(cur.state))
          if (t.action == *g) {
            matched = true;
            intern(Config{step.next, t.target}, depth[id] + 1);
          }
        if (!matched)
          report.preservation_breaks.push_back({cur.session, *g, cur.state});
      }
      else {
        std::size_t next = intern(Config{std::move(step.next), cur.state}, depth[id] + 1);
        tau_edges[id].push_back(next);
      }
    }
  }
  report.configs_visited = configs.size();

  // cycles in the internal-step subgraph, by iterative depth-first search
  std::vector<int> colour(configs.size(), 0);  // 0 new, 1 on stack, 2 done
  for (std::size_t root = 0; root < configs.size(); ++root) {
    if (colour[root] != 0 || tau_edges[root].empty()) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto & [node, next_edge] = stack.back();
      if (next_edge < tau_edges[node].size()) {
        std::size_t succ = tau_edges[node][next_edge++];
        if (colour[succ] == 1)
          report.tau_cycles.push_back({configs[succ].session, configs[succ].state});
        else if (colour[succ] == 0) {
          colour[succ] = 1;
          stack.emplace_back(succ, 0);
        }
      }
      else {
        colour[node] = 2;
        stack.pop_back();
      }
    }
  }
  return report;
}

std::string trace_to_jsonl(const Trace & trace)
{
  std::string out;
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    nlohmann::ordered_json j;
    if (auto g = std::get_if<GlobalAction>(&trace.actions[i])) {
      j["kind"] = "comm";
      j["from"] = g->sender.name;
      j["to"] = g->receiver.name;
      j["label"] = g->label.name;
      j["payload"] = std::string(to_string(g->payload));
      if (trace.values[i]) j["value"] = to_string(*trace.values[i]);
    }
    else {
      j["kind"] = "tau";
      j["role"] = std::get<TauAction>(trace.actions[i]).role.name;
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::string trace_to_text(const Trace & trace)
{
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    auto g = std::get_if<GlobalAction>(&trace.actions[i]);
    if (!g) continue;
    out << g->sender.name << " --" << g->label.name << "("
        << (trace.values[i] ? to_string(*trace.values[i]) : "?") << ")--> "
        << g->receiver.name << "\n";
  }
  return out.str();
}

std::string session_to_string(const Session & c)
{
  std::string out;
  for (const auto & [r, p] : c) out += r.name + ": " + to_string(p) + "\n";
  return out;
}

}  // namespace synmpst
