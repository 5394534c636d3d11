// Type checking of processes directly against the states of a multiparty
// LTS, and of whole sessions against its initial state.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "synmpst/mlts.hpp"
#include "synmpst/syntax.hpp"

namespace synmpst {

/// Innermost binding last.
using DataEnv = std::vector<std::pair<std::string, PayloadType>>;
using SessEnv = std::vector<std::pair<std::string, StateId>>;

std::string to_string(const DataEnv & gamma);

enum class TypeErrorKind
{
  UnexpectedSend,
  UnexpectedRecv,
  MissingRecvBranch,
  PayloadMismatch,
  SkipFailed,
  NotTerminable,
  VarStateUnreachable,
  UnboundVar,
  RoleClash,
  RoleUnimplemented,
  ExprIllTyped,
  IllFormed
};

std::string_view to_string(TypeErrorKind k);

struct TypeError
{
  TypeErrorKind kind;
  int premise = 0;  // failing Skip premise, 1..4
  Role role;
  StateId state;
  SourceSpan span;
  std::string message;
};

template <class T>
using Outcome = std::variant<T, TypeError>;

template <class T>
bool failed(const Outcome<T> & o)
{
  return std::holds_alternative<TypeError>(o);
}

enum class Rule
{
  Send,
  Recv,
  Skip,
  End,
  Let,
  If,
  Rec,
  Var,
  Comp
};

std::string_view to_string(Rule r);

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation
{
  Rule rule;
  Role role;
  StateId state;
  std::string gamma;    // rendered data environment
  std::string process;  // head of the process being typed
  std::vector<StateId> obligations;  // Skip only
  std::vector<DerivationPtr> premises;
};

/// Indented tree, one judgement per line.
std::string render_derivation(const Mlts & m, const Derivation & d);

Outcome<PayloadType> type_expr(const DataEnv & gamma, const Expr & e);

struct CheckOptions
{
  /// Require the state at a recursion variable to equal the state bound at
  /// its binder, instead of being reachable from it without the role.
  bool strict_var = false;
};

class TypeChecker
{
 public:
  explicit TypeChecker(const Mlts & m, CheckOptions opts = {});

  Outcome<DerivationPtr> type_process(const DataEnv & gamma,
                                      const SessEnv & delta,
                                      const Role & role,
                                      const Process & p,
                                      StateId s);

  /// Premises of the Skip rule for a send or receive at s; on success the
  /// states at which p must be checked next, in id order.
  Outcome<std::vector<StateId>> try_skip(const Role & role,
                                         const Process & p,
                                         StateId s) const;

 private:
  Outcome<DerivationPtr> check(const DataEnv & gamma,
                               const SessEnv & delta,
                               const Role & role,
                               const Process & p,
                               StateId s,
                               bool after_skip);
  Outcome<DerivationPtr> check_uncached(const DataEnv & gamma,
                                        const SessEnv & delta,
                                        const Role & role,
                                        const Process & p,
                                        StateId s,
                                        bool after_skip);
  Outcome<DerivationPtr> skip(const DataEnv & gamma,
                              const SessEnv & delta,
                              const Role & role,
                              const Process & p,
                              StateId s,
                              bool after_skip);
  TypeError error(TypeErrorKind kind,
                  const Role & role,
                  StateId s,
                  const SourceSpan & span,
                  std::string message) const;

  const Mlts & m_;
  CheckOptions opts_;
  std::unordered_map<std::string, Outcome<DerivationPtr>> memo_;
  std::vector<Process> roots_;
};

struct SessionCheck
{
  std::map<Role, DerivationPtr> derivations;
  std::vector<TypeError> errors;  // ordered by role

  bool ok() const { return errors.empty(); }
};

/// Every role active at the initial state, and every role in `required`,
/// must be implemented; each implemented role is checked at the initial
/// state with empty environments. Errors are collected, not fail-fast.
SessionCheck type_session(const Mlts & m,
                          const Session & session,
                          const RoleSet & required = {},
                          CheckOptions opts = {});

std::string error_to_string(const Mlts & m, const TypeError & e);
/// `{severity, kind, role, state, span, message}` objects, one per error.
std::string errors_to_json(const Mlts & m, const std::vector<TypeError> & errors);

}  // namespace synmpst
