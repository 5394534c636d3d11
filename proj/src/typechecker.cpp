#include "synmpst/typechecker.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

namespace synmpst {

std::string to_string(const DataEnv & gamma)
{
  std::string out;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (i) out += ", ";
    out += gamma[i].first + ":" + std::string(to_string(gamma[i].second));
  }
  return out;
}

std::string_view to_string(TypeErrorKind k)
{
  switch (k) {
    case TypeErrorKind::UnexpectedSend: return "UnexpectedSend";
    case TypeErrorKind::UnexpectedRecv: return "UnexpectedRecv";
    case TypeErrorKind::MissingRecvBranch: return "MissingRecvBranch";
    case TypeErrorKind::PayloadMismatch: return "PayloadMismatch";
    case TypeErrorKind::SkipFailed: return "SkipFailed";
    case TypeErrorKind::NotTerminable: return "NotTerminable";
    case TypeErrorKind::VarStateUnreachable: return "VarStateUnreachable";
    case TypeErrorKind::UnboundVar: return "UnboundVar";
    case TypeErrorKind::RoleClash: return "RoleClash";
    case TypeErrorKind::RoleUnimplemented: return "RoleUnimplemented";
    case TypeErrorKind::ExprIllTyped: return "ExprIllTyped";
    case TypeErrorKind::IllFormed: return "IllFormed";
  }
  return "?";
}

std::string_view to_string(Rule r)
{
  switch (r) {
    case Rule::Send: return "Send";
    case Rule::Recv: return "Recv";
    case Rule::Skip: return "Skip";
    case Rule::End: return "End";
    case Rule::Let: return "Let";
    case Rule::If: return "If";
    case Rule::Rec: return "Rec";
    case Rule::Var: return "Var";
    case Rule::Comp: return "Comp";
  }
  return "?";
}

namespace {

void render(const Mlts & m, const Derivation & d, int depth, std::ostringstream & out)
{
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(d.rule)
      << " " << d.role.name << " @ " << m.name(d.state) << " [" << d.gamma << "] "
      << d.process;
  if (d.rule == Rule::Skip) {
    out << " => {";
    for (std::size_t i = 0; i < d.obligations.size(); ++i)
      out << (i ? ", " : "") << m.name(d.obligations[i]);
    out << "}";
  }
  out << "\n";
  for (const auto & p : d.premises) render(m, *p, depth + 1, out);
}

TypeError expr_error(TypeErrorKind kind, const Expr & e, std::string message)
{
  TypeError err{kind, 0, {}, {}, e.span(), std::move(message)};
  return err;
}

}  // namespace

std::string render_derivation(const Mlts & m, const Derivation & d)
{
  std::ostringstream out;
  render(m, d, 0, out);
  return out.str();
}

Outcome<PayloadType> type_expr(const DataEnv & gamma, const Expr & e)
{
  if (auto lit = e.as<ELit>()) return lit->value.type;
  if (auto var = e.as<EVar>()) {
    for (auto it = gamma.rbegin(); it != gamma.rend(); ++it)
      if (it->first == var->name) return it->second;
    return expr_error(TypeErrorKind::UnboundVar, e,
                      "variable " + var->name + " is not bound");
  }
  const auto & bin = *e.as<EBinary>();
  auto lhs = type_expr(gamma, bin.lhs);
  if (failed(lhs)) return lhs;
  auto rhs = type_expr(gamma, bin.rhs);
  if (failed(rhs)) return rhs;
  PayloadType lt = std::get<PayloadType>(lhs);
  PayloadType rt = std::get<PayloadType>(rhs);
  if (bin.op == BinaryOp::Eq) {
    if (lt != rt)
      return expr_error(TypeErrorKind::ExprIllTyped, e,
                        "cannot compare " + std::string(to_string(lt)) + " with "
                            + std::string(to_string(rt)));
    return PayloadType::Bool;
  }
  if (lt == rt && (lt == PayloadType::Nat || lt == PayloadType::Int)) return lt;
  return expr_error(TypeErrorKind::ExprIllTyped, e,
                    std::string("arithmetic needs two Nat or two Int operands, got ")
                        + std::string(to_string(lt)) + " and "
                        + std::string(to_string(rt)));
}

TypeChecker::TypeChecker(const Mlts & m, CheckOptions opts) : m_(m), opts_(opts) {}

TypeError TypeChecker::error(TypeErrorKind kind,
                             const Role & role,
                             StateId s,
                             const SourceSpan & span,
                             std::string message) const
{
  return TypeError{kind, 0, role, s, span, std::move(message)};
}

Outcome<DerivationPtr> TypeChecker::type_process(const DataEnv & gamma,
                                                 const SessEnv & delta,
                                                 const Role & role,
                                                 const Process & p,
                                                 StateId s)
{
  // Memo keys are node addresses, so every root stays alive as long as the
  // memo table does.
  roots_.push_back(p);
  return check(gamma, delta, role, p, s, false);
}

Outcome<DerivationPtr> TypeChecker::check(const DataEnv & gamma,
                                          const SessEnv & delta,
                                          const Role & role,
                                          const Process & p,
                                          StateId s,
                                          bool after_skip)
{
  // Checking never rewrites process terms and roots are pinned, so a node's
  // address identifies the subterm.
  std::ostringstream key;
  key << p.identity() << '|' << s.value << '|' << after_skip << '|' << role.name
      << '|' << to_string(gamma) << '|';
  for (const auto & [x, st] : delta) key << x << '=' << st.value << ';';
  auto k = key.str();
  if (auto it = memo_.find(k); it != memo_.end()) return it->second;
  auto result = check_uncached(gamma, delta, role, p, s, after_skip);
  memo_.emplace(std::move(k), result);
  return result;
}

Outcome<DerivationPtr> TypeChecker::check_uncached(const DataEnv & gamma,
                                                   const SessEnv & delta,
                                                   const Role & role,
                                                   const Process & p,
                                                   StateId s,
                                                   bool after_skip)
{
  const auto & g = m_.graph;
  auto node = [&](Rule rule, std::vector<DerivationPtr> premises) {
    return std::make_shared<const Derivation>(
        Derivation{rule, role, s, to_string(gamma), summary(p), {}, std::move(premises)});
  };
  auto at = [&](const SourceSpan & span, TypeError e) {
    e.role = role;
    e.state = s;
    if (!e.span.valid()) e.span = span;
    return e;
  };
  const std::string where = " at state " + m_.name(s);

  if (auto send = p.as<PSend>()) {
    auto ty = type_expr(gamma, send->payload);
    if (failed(ty)) return at(p.span(), std::get<TypeError>(ty));
    PayloadType t = std::get<PayloadType>(ty);
    if (send->to == role)
      return error(TypeErrorKind::RoleClash, role, s, p.span(),
                   "role " + role.name + " sends to itself");
    GlobalAction wanted{role, send->to, send->label, t};
    std::optional<TypeError> first_failure;
    for (const auto & step : g.out(s)) {
      if (step.action != wanted) continue;
      auto sub = check(gamma, delta, role, send->cont, step.target, false);
      if (!failed(sub)) return node(Rule::Send, {std::get<DerivationPtr>(sub)});
      if (!first_failure) first_failure = std::get<TypeError>(sub);
    }
    if (first_failure) return *first_failure;
    if (!g.enabled(s, role)) return skip(gamma, delta, role, p, s, after_skip);
    for (const auto & step : g.out(s)) {
      const auto & a = step.action;
      if (a.sender == role && a.receiver == send->to && a.label == send->label)
        return error(TypeErrorKind::PayloadMismatch, role, s, send->payload.span(),
                     role.name + " sends " + send->label.name + " to " + send->to.name
                         + " with payload " + std::string(to_string(t)) + where
                         + ", but the specification expects "
                         + std::string(to_string(a.payload)));
    }
    std::string specified;
    for (const auto & step : g.step_with(s, {role}))
      specified += (specified.empty() ? "" : ", ") + to_string(step.action);
    return error(TypeErrorKind::UnexpectedSend, role, s, p.span(),
                 role.name + " sends " + to_string(wanted) + where
                     + ", which is not specified; specified: " + specified);
  }

  if (auto recv = p.as<PRecv>()) {
    if (recv->from == role)
      return error(TypeErrorKind::RoleClash, role, s, p.span(),
                   "role " + role.name + " receives from itself");
    std::vector<Step> incoming;
    for (const auto & step : g.out(s))
      if (step.action.sender == recv->from && step.action.receiver == role)
        incoming.push_back(step);
    if (incoming.empty()) {
      if (!g.enabled(s, role)) return skip(gamma, delta, role, p, s, after_skip);
      std::string specified;
      for (const auto & step : g.step_with(s, {role}))
        specified += (specified.empty() ? "" : ", ") + to_string(step.action);
      return error(TypeErrorKind::UnexpectedRecv, role, s, p.span(),
                   role.name + " receives from " + recv->from.name + where
                       + ", which is not specified; specified: " + specified);
    }
    std::vector<DerivationPtr> premises;
    for (const auto & step : incoming) {
      const auto & a = step.action;
      const PRecvBranch * branch = nullptr;
      for (const auto & b : recv->branches)
        if (b.label == a.label) branch = &b;
      if (!branch)
        return error(TypeErrorKind::MissingRecvBranch, role, s, p.span(),
                     role.name + " has no branch for " + to_string(a) + where);
      if (branch->annot != a.payload)
        return error(TypeErrorKind::PayloadMismatch, role, s, p.span(),
                     role.name + " receives " + a.label.name + " as "
                         + std::string(to_string(branch->annot)) + where
                         + ", but the specification sends "
                         + std::string(to_string(a.payload)));
      DataEnv inner = gamma;
      inner.emplace_back(branch->binder, a.payload);
      auto sub = check(inner, delta, role, branch->cont, step.target, false);
      if (failed(sub)) return sub;
      premises.push_back(std::get<DerivationPtr>(sub));
    }
    return node(Rule::Recv, std::move(premises));
  }

  if (auto let = p.as<PLet>()) {
    auto ty = type_expr(gamma, let->rhs);
    if (failed(ty)) return at(p.span(), std::get<TypeError>(ty));
    DataEnv inner = gamma;
    inner.emplace_back(let->binder, std::get<PayloadType>(ty));
    auto sub = check(inner, delta, role, let->cont, s, false);
    if (failed(sub)) return sub;
    return node(Rule::Let, {std::get<DerivationPtr>(sub)});
  }

  if (auto cond = p.as<PIf>()) {
    auto ty = type_expr(gamma, cond->cond);
    if (failed(ty)) return at(p.span(), std::get<TypeError>(ty));
    if (std::get<PayloadType>(ty) != PayloadType::Bool)
      return error(TypeErrorKind::ExprIllTyped, role, s, cond->cond.span(),
                   "condition has type "
                       + std::string(to_string(std::get<PayloadType>(ty)))
                       + ", expected Bool");
    auto then_d = check(gamma, delta, role, cond->then_branch, s, false);
    if (failed(then_d)) return then_d;
    auto else_d = check(gamma, delta, role, cond->else_branch, s, false);
    if (failed(else_d)) return else_d;
    return node(Rule::If,
                {std::get<DerivationPtr>(then_d), std::get<DerivationPtr>(else_d)});
  }

  if (auto rec = p.as<PRec>()) {
    if (!is_message_guarded(p))
      return error(TypeErrorKind::IllFormed, role, s, p.span(),
                   "recursion on " + rec->var + " is not guarded by a send or receive");
    SessEnv inner = delta;
    inner.emplace_back(rec->var, s);
    auto sub = check(gamma, inner, role, rec->body, s, false);
    if (failed(sub)) return sub;
    return node(Rule::Rec, {std::get<DerivationPtr>(sub)});
  }

  if (auto var = p.as<PVar>()) {
    const StateId * bound = nullptr;
    for (auto it = delta.rbegin(); it != delta.rend() && !bound; ++it)
      if (it->first == var->name) bound = &it->second;
    if (!bound)
      return error(TypeErrorKind::UnboundVar, role, s, p.span(),
                   "recursion variable " + var->name + " is not bound");
    bool ok = false;
    if (opts_.strict_var)
      ok = *bound == s;
    else
      for (StateId r : g.reach_without(*bound, {role})) ok = ok || r == s;
    if (!ok)
      return error(TypeErrorKind::VarStateUnreachable, role, s, p.span(),
                   "recursion variable " + var->name + " was bound at state "
                       + m_.name(*bound) + ", but state " + m_.name(s)
                       + (opts_.strict_var
                              ? " differs from it"
                              : " is not reachable from it without " + role.name));
    return node(Rule::Var, {});
  }

  // end
  for (StateId n : g.reach_without(s, {role}))
    if (g.enabled(n, role)) {
      std::string pending;
      for (const auto & step : g.step_with(n, {role}))
        pending += (pending.empty() ? "" : ", ") + to_string(step.action);
      return error(TypeErrorKind::NotTerminable, role, s, p.span(),
                   role.name + " ends" + where + ", but state " + m_.name(n)
                       + " still specifies " + pending);
    }
  return node(Rule::End, {});
}

Outcome<DerivationPtr> TypeChecker::skip(const DataEnv & gamma,
                                         const SessEnv & delta,
                                         const Role & role,
                                         const Process & p,
                                         StateId s,
                                         bool after_skip)
{
  if (after_skip) {
    TypeError e = error(TypeErrorKind::SkipFailed, role, s, p.span(),
                        role.name + " cannot skip twice in a row at state "
                            + m_.name(s));
    e.premise = 1;
    return e;
  }
  auto obligations = try_skip(role, p, s);
  if (failed(obligations)) return std::get<TypeError>(obligations);
  auto states = std::get<std::vector<StateId>>(obligations);
  std::vector<DerivationPtr> premises;
  for (StateId d : states) {
    auto sub = check(gamma, delta, role, p, d, true);
    if (failed(sub)) return sub;
    premises.push_back(std::get<DerivationPtr>(sub));
  }
  return std::make_shared<const Derivation>(Derivation{
      Rule::Skip, role, s, to_string(gamma), summary(p), states, std::move(premises)});
}

Outcome<std::vector<StateId>> TypeChecker::try_skip(const Role & role,
                                                    const Process & p,
                                                    StateId s) const
{
  const auto & g = m_.graph;
  auto fail = [&](int premise, StateId at, std::string message) {
    TypeError e = error(TypeErrorKind::SkipFailed, role, at, p.span(), std::move(message));
    e.premise = premise;
    return e;
  };
  auto partner = obj(p);
  if (!partner)
    return fail(1, s, "only a send or receive can wait for a later communication");

  const RoleSet self{role};
  if (g.enabled(s, role))
    return fail(1, s, role.name + " is enabled at state " + m_.name(s)
                          + ", so its communications cannot be skipped");

  const auto near = g.reach_without(s, self);
  std::set<StateId> obligations;
  for (StateId n : near) {
    bool any = false;
    for (StateId d : g.reach_strong_without(n, self))
      if (g.enabled(d, role)) {
        any = true;
        obligations.insert(d);
      }
    if (!any)
      return fail(2, n, "from state " + m_.name(n) + " no later state specifies a "
                            "communication of " + role.name);
  }

  const RoleSet pair{role, *partner};
  for (StateId n : near) {
    if (g.enabled(n, role)) continue;
    for (StateId w : g.reach_without(n, pair))
      if (!g.step_with(w, pair).empty())
        return fail(4, n, role.name + " and " + partner->name
                              + " can start communicating at state " + m_.name(w)
                              + " without either first talking to another role");
  }
  return std::vector<StateId>(obligations.begin(), obligations.end());
}

SessionCheck type_session(const Mlts & m,
                          const Session & session,
                          const RoleSet & required,
                          CheckOptions opts)
{
  SessionCheck result;
  RoleSet needed = required;
  for (const auto & role : m.graph.roles())
    if (m.graph.active(m.initial(), role)) needed.insert(role);

  std::map<Role, std::vector<TypeError>> by_role;
  for (const auto & role : needed)
    if (!session.count(role))
      by_role[role].push_back(TypeError{
          TypeErrorKind::RoleUnimplemented, 0, role, m.initial(), {},
          "role " + role.name + " takes part in the protocol but is not implemented"});

  std::vector<std::pair<Role, Process>> work(session.begin(), session.end());
  std::vector<Outcome<DerivationPtr>> outcomes(work.size(), DerivationPtr{});
  std::vector<std::vector<TypeError>> wf_errors(work.size());

  const long n = static_cast<long>(work.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto & [role, proc] = work[static_cast<std::size_t>(i)];
    auto & wf = wf_errors[static_cast<std::size_t>(i)];
    for (const auto & v : check_wellformed_process(proc))
      wf.push_back(TypeError{v.kind == WellFormednessKind::UnboundVariable
                                 ? TypeErrorKind::UnboundVar
                                 : TypeErrorKind::IllFormed,
                             0, role, m.initial(), v.span, v.message});
    if (!wf.empty()) continue;
    TypeChecker checker(m, opts);
    outcomes[static_cast<std::size_t>(i)] =
        checker.type_process({}, {}, role, proc, m.initial());
  }

  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto & role = work[i].first;
    auto & errs = by_role[role];
    if (!wf_errors[i].empty())
      errs.insert(errs.end(), wf_errors[i].begin(), wf_errors[i].end());
    else if (failed(outcomes[i]))
      errs.push_back(std::get<TypeError>(outcomes[i]));
    else
      result.derivations[role] = std::get<DerivationPtr>(outcomes[i]);
  }
  for (auto & [role, errs] : by_role)
    result.errors.insert(result.errors.end(), errs.begin(), errs.end());
  return result;
}

std::string error_to_string(const Mlts & m, const TypeError & e)
{
  std::string out = "error[" + std::string(to_string(e.kind));
  if (e.kind == TypeErrorKind::SkipFailed) out += " premise " + std::to_string(e.premise);
  out += "] role " + e.role.name + " at " + m.name(e.state);
  if (e.span.valid()) out += " (" + to_string(e.span) + ")";
  return out + ": " + e.message;
}

std::string errors_to_json(const Mlts & m, const std::vector<TypeError> & errors)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & e : errors) {
    nlohmann::ordered_json j;
    j["severity"] = "error";
    j["kind"] = std::string(to_string(e.kind));
    if (e.kind == TypeErrorKind::SkipFailed) j["premise"] = e.premise;
    j["role"] = e.role.name;
    j["state"] = m.name(e.state);
    j["span"] = {{"file", e.span.file},
                 {"startLine", e.span.start_line},
                 {"startCol", e.span.start_col},
                 {"endLine", e.span.end_line},
                 {"endCol", e.span.end_col}};
    j["message"] = e.message;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace synmpst
