// Term representations for global types, processes, sessions and expressions.
//
// All terms are immutable values backed by shared nodes. Copying a term is
// cheap and terms may be shared freely between threads. Equality is
// structural; source spans are carried along for diagnostics but never take
// part in equality or hashing.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synmpst {

struct SourceSpan
{
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool valid() const { return start_line > 0; }
};

std::string to_string(const SourceSpan & span);

struct Role
{
  std::string name;
  friend auto operator<=>(const Role &, const Role &) = default;
};

struct Label
{
  std::string name;
  friend auto operator<=>(const Label &, const Label &) = default;
};

enum class PayloadType
{
  Unit,
  Bool,
  Nat,
  Int,
  Str
};

std::string_view to_string(PayloadType t);
std::optional<PayloadType> payload_type_from_string(std::string_view s);

/// sender -> receiver : label(payload)
struct GlobalAction
{
  Role sender;
  Role receiver;
  Label label;
  PayloadType payload = PayloadType::Unit;

  bool involves(const Role & r) const { return sender == r || receiver == r; }
  friend auto operator<=>(const GlobalAction &, const GlobalAction &) = default;
};

std::string to_string(const GlobalAction & a);

struct GlobalActionHash
{
  std::size_t operator()(const GlobalAction & a) const;
};

using RoleSet = std::set<Role>;

std::size_t hash_combine(std::size_t seed, std::size_t value);

// ---------------------------------------------------------------------------
// Expressions and values

struct Value
{
  PayloadType type = PayloadType::Unit;
  std::variant<std::monostate, bool, std::uint64_t, std::int64_t, std::string>
      data;

  static Value unit() { return {PayloadType::Unit, std::monostate{}}; }
  static Value boolean(bool b) { return {PayloadType::Bool, b}; }
  static Value nat(std::uint64_t n) { return {PayloadType::Nat, n}; }
  static Value integer(std::int64_t n) { return {PayloadType::Int, n}; }
  static Value str(std::string s) { return {PayloadType::Str, std::move(s)}; }

  friend bool operator==(const Value &, const Value &) = default;
};

std::string to_string(const Value & v);

enum class BinaryOp
{
  Add,
  Mul,
  Eq
};

struct ExprNode;

class Expr
{
 public:
  Expr();  // unit literal

  static Expr literal(Value v, SourceSpan span = {});
  static Expr var(std::string name, SourceSpan span = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span = {});

  const ExprNode & node() const { return *node_; }
  template <class T>
  const T * as() const;
  std::size_t hash() const;
  const SourceSpan & span() const;

  /// The literal value if this expression is a literal.
  std::optional<Value> value() const;

  friend bool operator==(const Expr & a, const Expr & b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ELit
{
  Value value;
};
struct EVar
{
  std::string name;
};
struct EBinary
{
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};

struct ExprNode
{
  std::variant<ELit, EVar, EBinary> kind;
  std::size_t hash = 0;
  SourceSpan span;
};

template <class T>
const T * Expr::as() const
{
  return std::get_if<T>(&node_->kind);
}

std::string to_string(const Expr & e);

// ---------------------------------------------------------------------------
// Global types

struct GlobalNode;

class GlobalType
{
 public:
  GlobalType();  // end

  const GlobalNode & node() const { return *node_; }
  template <class T>
  const T * as() const;
  std::size_t hash() const;
  const SourceSpan & span() const;
  bool is_end() const;

  friend bool operator==(const GlobalType & a, const GlobalType & b);

 private:
  friend GlobalType make_global(struct GlobalNode node);
  explicit GlobalType(std::shared_ptr<const GlobalNode> n) : node_(std::move(n))
  {
  }
  std::shared_ptr<const GlobalNode> node_;
};

struct GBranch
{
  Label label;
  PayloadType payload = PayloadType::Unit;
  GlobalType cont;
};

struct GComm
{
  Role sender;
  Role receiver;
  std::vector<GBranch> branches;
};

struct GMu
{
  std::string var;
  GlobalType body;
};

struct GVar
{
  std::string name;
};

struct GEnd
{
};

struct GPar
{
  GlobalType left;
  GlobalType right;
};

struct GlobalNode
{
  std::variant<GComm, GMu, GVar, GEnd, GPar> kind;
  std::size_t hash = 0;
  SourceSpan span;
};

template <class T>
const T * GlobalType::as() const
{
  return std::get_if<T>(&node_->kind);
}

GlobalType make_global(GlobalNode node);
GlobalType g_comm(Role sender,
                  Role receiver,
                  std::vector<GBranch> branches,
                  SourceSpan span = {});
/// Single-branch communication.
GlobalType g_msg(Role sender,
                 Role receiver,
                 Label label,
                 PayloadType payload,
                 GlobalType cont,
                 SourceSpan span = {});
GlobalType g_mu(std::string var, GlobalType body, SourceSpan span = {});
GlobalType g_var(std::string name, SourceSpan span = {});
GlobalType g_end(SourceSpan span = {});
GlobalType g_par(GlobalType left, GlobalType right, SourceSpan span = {});

struct GlobalTypeHash
{
  std::size_t operator()(const GlobalType & g) const { return g.hash(); }
};

std::string to_string(const GlobalType & g);

// ---------------------------------------------------------------------------
// Processes

struct ProcessNode;

class Process
{
 public:
  Process();  // end

  const ProcessNode & node() const { return *node_; }
  template <class T>
  const T * as() const;
  std::size_t hash() const;
  const SourceSpan & span() const;
  bool is_end() const;
  /// Identity of the underlying node; stable for the lifetime of the term.
  const void * identity() const { return node_.get(); }

  friend bool operator==(const Process & a, const Process & b);

 private:
  friend Process make_process(struct ProcessNode node);
  explicit Process(std::shared_ptr<const ProcessNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ProcessNode> node_;
};

struct PSend
{
  Role to;
  Label label;
  Expr payload;
  Process cont;
};

struct PRecvBranch
{
  Label label;
  std::string binder;
  PayloadType annot = PayloadType::Unit;
  Process cont;
};

struct PRecv
{
  Role from;
  std::vector<PRecvBranch> branches;
};

struct PLet
{
  std::string binder;
  Expr rhs;
  Process cont;
};

struct PIf
{
  Expr cond;
  Process then_branch;
  Process else_branch;
};

struct PRec
{
  std::string var;
  Process body;
};

struct PVar
{
  std::string name;
};

struct PEnd
{
};

struct ProcessNode
{
  std::variant<PSend, PRecv, PLet, PIf, PRec, PVar, PEnd> kind;
  std::size_t hash = 0;
  SourceSpan span;
};

template <class T>
const T * Process::as() const
{
  return std::get_if<T>(&node_->kind);
}

Process make_process(ProcessNode node);
Process p_send(Role to, Label label, Expr payload, Process cont, SourceSpan span = {});
Process p_recv(Role from, std::vector<PRecvBranch> branches, SourceSpan span = {});
Process p_let(std::string binder, Expr rhs, Process cont, SourceSpan span = {});
Process p_if(Expr cond, Process then_branch, Process else_branch, SourceSpan span = {});
Process p_rec(std::string var, Process body, SourceSpan span = {});
Process p_var(std::string name, SourceSpan span = {});
Process p_end(SourceSpan span = {});

struct ProcessHash
{
  std::size_t operator()(const Process & p) const { return p.hash(); }
};

std::string to_string(const Process & p);
/// Head of a process, continuations elided ("send b Foo(5). ...").
std::string summary(const Process & p);

/// A session maps each implemented role to its process.
using Session = std::map<Role, Process>;

std::size_t hash_session(const Session & s);

// ---------------------------------------------------------------------------
// Operations on terms

/// Capture-avoiding substitution of free occurrences of recursion variable x.
GlobalType substitute_global(const GlobalType & g,
                             const std::string & x,
                             const GlobalType & replacement);

Process substitute_process_rec(const Process & p,
                               const std::string & x,
                               const Process & replacement);

/// Replaces free data-variable occurrences of x by the literal v.
Process substitute_process_val(const Process & p,
                               const std::string & x,
                               const Value & v);
Expr substitute_expr(const Expr & e, const std::string & x, const Value & v);

std::set<std::string> free_rec_vars(const GlobalType & g);
std::set<std::string> free_rec_vars(const Process & p);
std::set<std::string> free_data_vars(const Process & p);
std::set<std::string> free_data_vars(const Expr & e);

/// Receiver of a send, sender of a receive, nothing otherwise.
std::optional<Role> obj(const Process & p);

RoleSet roles_of(const GlobalType & g);

enum class WellFormednessKind
{
  Unguarded,
  UnboundVariable,
  DuplicateLabel,
  ParOverlap,
  ShadowedBinder,
  SelfCommunication
};

std::string_view to_string(WellFormednessKind k);

struct WellFormednessViolation
{
  WellFormednessKind kind;
  std::string message;
  SourceSpan span;
};

/// Empty result means the term is well formed.
std::vector<WellFormednessViolation> check_wellformed_global(
    const GlobalType & g);
std::vector<WellFormednessViolation> check_wellformed_process(
    const Process & p);

/// Message-guardedness of every bound recursion variable in p.
bool is_message_guarded(const Process & p);

}  // namespace synmpst
