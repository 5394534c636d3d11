#include "synmpst/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <utility>

namespace synmpst {

std::size_t hash_combine(std::size_t seed, std::size_t value)
{
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

namespace {

std::size_t hash_str(std::string_view s) { return std::hash<std::string_view>{}(s); }

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string to_string(const SourceSpan & span)
{
  std::ostringstream out;
  out << (span.file.empty() ? "<input>" : span.file) << ":" << span.start_line
      << ":" << span.start_col;
  return out.str();
}

std::string_view to_string(PayloadType t)
{
  switch (t) {
    case PayloadType::Unit: return "Unit";
    case PayloadType::Bool: return "Bool";
    case PayloadType::Nat: return "Nat";
    case PayloadType::Int: return "Int";
    case PayloadType::Str: return "Str";
  }
  return "?";
}

std::optional<PayloadType> payload_type_from_string(std::string_view s)
{
  if (s == "Unit") return PayloadType::Unit;
  if (s == "Bool") return PayloadType::Bool;
  if (s == "Nat") return PayloadType::Nat;
  if (s == "Int") return PayloadType::Int;
  if (s == "Str") return PayloadType::Str;
  return std::nullopt;
}

std::string to_string(const GlobalAction & a)
{
  std::string out = a.sender.name + "->" + a.receiver.name + ":" + a.label.name
                    + "(" + std::string(to_string(a.payload)) + ")";
  return out;
}

std::size_t GlobalActionHash::operator()(const GlobalAction & a) const
{
  std::size_t h = hash_str(a.sender.name);
  h = hash_combine(h, hash_str(a.receiver.name));
  h = hash_combine(h, hash_str(a.label.name));
  return hash_combine(h, static_cast<std::size_t>(a.payload));
}

// ---------------------------------------------------------------------------
// Values and expressions

namespace {

std::string quote(const std::string & s)
{
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::size_t hash_value(const Value & v)
{
  std::size_t h = static_cast<std::size_t>(v.type) + 1;
  return std::visit(
      overloaded{
          [&](std::monostate) { return h; },
          [&](bool b) { return hash_combine(h, b ? 1 : 2); },
          [&](std::uint64_t n) { return hash_combine(h, std::hash<std::uint64_t>{}(n)); },
          [&](std::int64_t n) { return hash_combine(h, std::hash<std::int64_t>{}(n)); },
          [&](const std::string & s) { return hash_combine(h, hash_str(s)); },
      },
      v.data);
}

}  // namespace

std::string to_string(const Value & v)
{
  return std::visit(
      overloaded{
          [](std::monostate) -> std::string { return "unit"; },
          [](bool b) -> std::string { return b ? "true" : "false"; },
          [](std::uint64_t n) { return std::to_string(n); },
          [](std::int64_t n) { return std::to_string(n) + "i"; },
          [](const std::string & s) { return quote(s); },
      },
      v.data);
}

Expr::Expr() : Expr(literal(Value::unit())) {}

Expr Expr::literal(Value v, SourceSpan span)
{
  auto node = std::make_shared<ExprNode>();
  node->hash = hash_combine(11, hash_value(v));
  node->kind = ELit{std::move(v)};
  node->span = std::move(span);
  return Expr(std::move(node));
}

Expr Expr::var(std::string name, SourceSpan span)
{
  auto node = std::make_shared<ExprNode>();
  node->hash = hash_combine(13, hash_str(name));
  node->kind = EVar{std::move(name)};
  node->span = std::move(span);
  return Expr(std::move(node));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span)
{
  auto node = std::make_shared<ExprNode>();
  std::size_t h = hash_combine(17, static_cast<std::size_t>(op));
  h = hash_combine(h, lhs.hash());
  node->hash = hash_combine(h, rhs.hash());
  node->kind = EBinary{op, std::move(lhs), std::move(rhs)};
  node->span = std::move(span);
  return Expr(std::move(node));
}

std::size_t Expr::hash() const { return node_->hash; }
const SourceSpan & Expr::span() const { return node_->span; }

std::optional<Value> Expr::value() const
{
  if (auto lit = as<ELit>()) return lit->value;
  return std::nullopt;
}

bool operator==(const Expr & a, const Expr & b)
{
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return std::visit(
      overloaded{
          [&](const ELit & x) {
            auto y = b.as<ELit>();
            return y && x.value == y->value;
          },
          [&](const EVar & x) {
            auto y = b.as<EVar>();
            return y && x.name == y->name;
          },
          [&](const EBinary & x) {
            auto y = b.as<EBinary>();
            return y && x.op == y->op && x.lhs == y->lhs && x.rhs == y->rhs;
          },
      },
      a.node().kind);
}

namespace {

int precedence(const Expr & e)
{
  if (auto bin = e.as<EBinary>()) {
    switch (bin->op) {
      case BinaryOp::Eq: return 1;
      case BinaryOp::Add: return 2;
      case BinaryOp::Mul: return 3;
    }
  }
  return 4;
}

std::string_view op_text(BinaryOp op)
{
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Eq: return "==";
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr & e)
{
  return std::visit(
      overloaded{
          [](const ELit & lit) { return to_string(lit.value); },
          [](const EVar & v) { return v.name; },
          [&](const EBinary & bin) {
            int prec = precedence(e);
            std::string lhs = to_string(bin.lhs);
            std::string rhs = to_string(bin.rhs);
            // left associative; == does not chain
            if (precedence(bin.lhs) < prec
                || (bin.op == BinaryOp::Eq && precedence(bin.lhs) == prec))
              lhs = "(" + lhs + ")";
            if (precedence(bin.rhs) <= prec) rhs = "(" + rhs + ")";
            return lhs + std::string(op_text(bin.op)) + rhs;
          },
      },
      e.node().kind);
}

// ---------------------------------------------------------------------------
// Global types

GlobalType::GlobalType() : GlobalType(g_end()) {}

std::size_t GlobalType::hash() const { return node_->hash; }
const SourceSpan & GlobalType::span() const { return node_->span; }
bool GlobalType::is_end() const { return as<GEnd>() != nullptr; }

GlobalType make_global(GlobalNode node)
{
  std::size_t h = std::visit(
      overloaded{
          [](const GComm & c) {
            std::size_t h = hash_combine(101, hash_str(c.sender.name));
            h = hash_combine(h, hash_str(c.receiver.name));
            for (const auto & b : c.branches) {
              h = hash_combine(h, hash_str(b.label.name));
              h = hash_combine(h, static_cast<std::size_t>(b.payload));
              h = hash_combine(h, b.cont.hash());
            }
            return h;
          },
          [](const GMu & m) {
            return hash_combine(hash_combine(103, hash_str(m.var)), m.body.hash());
          },
          [](const GVar & v) { return hash_combine(107, hash_str(v.name)); },
          [](const GEnd &) { return std::size_t{109}; },
          [](const GPar & p) {
            return hash_combine(hash_combine(113, p.left.hash()), p.right.hash());
          },
      },
      node.kind);
  node.hash = h;
  return GlobalType(std::make_shared<const GlobalNode>(std::move(node)));
}

GlobalType g_comm(Role sender,
                  Role receiver,
                  std::vector<GBranch> branches,
                  SourceSpan span)
{
  return make_global(
      {GComm{std::move(sender), std::move(receiver), std::move(branches)}, 0,
       std::move(span)});
}

GlobalType g_msg(Role sender,
                 Role receiver,
                 Label label,
                 PayloadType payload,
                 GlobalType cont,
                 SourceSpan span)
{
  return g_comm(std::move(sender), std::move(receiver),
                {GBranch{std::move(label), payload, std::move(cont)}},
                std::move(span));
}

GlobalType g_mu(std::string var, GlobalType body, SourceSpan span)
{
  return make_global({GMu{std::move(var), std::move(body)}, 0, std::move(span)});
}

GlobalType g_var(std::string name, SourceSpan span)
{
  return make_global({GVar{std::move(name)}, 0, std::move(span)});
}

GlobalType g_end(SourceSpan span)
{
  return make_global({GEnd{}, 0, std::move(span)});
}

GlobalType g_par(GlobalType left, GlobalType right, SourceSpan span)
{
  return make_global(
      {GPar{std::move(left), std::move(right)}, 0, std::move(span)});
}

bool operator==(const GlobalType & a, const GlobalType & b)
{
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return std::visit(
      overloaded{
          [&](const GComm & x) {
            auto y = b.as<GComm>();
            if (!y || x.sender != y->sender || x.receiver != y->receiver
                || x.branches.size() != y->branches.size())
              return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i) {
              const auto & bx = x.branches[i];
              const auto & by = y->branches[i];
              if (bx.label != by.label || bx.payload != by.payload
                  || !(bx.cont == by.cont))
                return false;
            }
            return true;
          },
          [&](const GMu & x) {
            auto y = b.as<GMu>();
            return y && x.var == y->var && x.body == y->body;
          },
          [&](const GVar & x) {
            auto y = b.as<GVar>();
            return y && x.name == y->name;
          },
          [&](const GEnd &) { return b.is_end(); },
          [&](const GPar & x) {
            auto y = b.as<GPar>();
            return y && x.left == y->left && x.right == y->right;
          },
      },
      a.node().kind);
}

std::string to_string(const GlobalType & g)
{
  return std::visit(
      overloaded{
          [](const GComm & c) {
            std::string head = c.sender.name + " -> " + c.receiver.name;
            auto branch = [](const GBranch & b) {
              return b.label.name + "(" + std::string(to_string(b.payload))
                     + "). " + to_string(b.cont);
            };
            if (c.branches.size() == 1) return head + ": " + branch(c.branches[0]);
            std::string out = head + " { ";
            for (std::size_t i = 0; i < c.branches.size(); ++i) {
              if (i) out += ", ";
              out += branch(c.branches[i]);
            }
            return out + " }";
          },
          [](const GMu & m) { return "mu " + m.var + ". " + to_string(m.body); },
          [](const GVar & v) { return v.name; },
          [](const GEnd &) { return std::string("end"); },
          [](const GPar & p) {
            return "par { " + to_string(p.left) + " || " + to_string(p.right)
                   + " }";
          },
      },
      g.node().kind);
}

// ---------------------------------------------------------------------------
// Processes

Process::Process() : Process(p_end()) {}

std::size_t Process::hash() const { return node_->hash; }
const SourceSpan & Process::span() const { return node_->span; }
bool Process::is_end() const { return as<PEnd>() != nullptr; }

Process make_process(ProcessNode node)
{
  std::size_t h = std::visit(
      overloaded{
          [](const PSend & s) {
            std::size_t h = hash_combine(201, hash_str(s.to.name));
            h = hash_combine(h, hash_str(s.label.name));
            h = hash_combine(h, s.payload.hash());
            return hash_combine(h, s.cont.hash());
          },
          [](const PRecv & r) {
            std::size_t h = hash_combine(203, hash_str(r.from.name));
            for (const auto & b : r.branches) {
              h = hash_combine(h, hash_str(b.label.name));
              h = hash_combine(h, hash_str(b.binder));
              h = hash_combine(h, static_cast<std::size_t>(b.annot));
              h = hash_combine(h, b.cont.hash());
            }
            return h;
          },
          [](const PLet & l) {
            std::size_t h = hash_combine(207, hash_str(l.binder));
            h = hash_combine(h, l.rhs.hash());
            return hash_combine(h, l.cont.hash());
          },
          [](const PIf & i) {
            std::size_t h = hash_combine(211, i.cond.hash());
            h = hash_combine(h, i.then_branch.hash());
            return hash_combine(h, i.else_branch.hash());
          },
          [](const PRec & r) {
            return hash_combine(hash_combine(213, hash_str(r.var)), r.body.hash());
          },
          [](const PVar & v) { return hash_combine(217, hash_str(v.name)); },
          [](const PEnd &) { return std::size_t{219}; },
      },
      node.kind);
  node.hash = h;
  return Process(std::make_shared<const ProcessNode>(std::move(node)));
}

Process p_send(Role to, Label label, Expr payload, Process cont, SourceSpan span)
{
  return make_process({PSend{std::move(to), std::move(label), std::move(payload),
                             std::move(cont)},
                       0, std::move(span)});
}

Process p_recv(Role from, std::vector<PRecvBranch> branches, SourceSpan span)
{
  return make_process(
      {PRecv{std::move(from), std::move(branches)}, 0, std::move(span)});
}

Process p_let(std::string binder, Expr rhs, Process cont, SourceSpan span)
{
  return make_process(
      {PLet{std::move(binder), std::move(rhs), std::move(cont)}, 0,
       std::move(span)});
}

Process p_if(Expr cond, Process then_branch, Process else_branch, SourceSpan span)
{
  return make_process({PIf{std::move(cond), std::move(then_branch),
                           std::move(else_branch)},
                       0, std::move(span)});
}

Process p_rec(std::string var, Process body, SourceSpan span)
{
  return make_process({PRec{std::move(var), std::move(body)}, 0, std::move(span)});
}

Process p_var(std::string name, SourceSpan span)
{
  return make_process({PVar{std::move(name)}, 0, std::move(span)});
}

Process p_end(SourceSpan span) { return make_process({PEnd{}, 0, std::move(span)}); }

bool operator==(const Process & a, const Process & b)
{
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return std::visit(
      overloaded{
          [&](const PSend & x) {
            auto y = b.as<PSend>();
            return y && x.to == y->to && x.label == y->label
                   && x.payload == y->payload && x.cont == y->cont;
          },
          [&](const PRecv & x) {
            auto y = b.as<PRecv>();
            if (!y || x.from != y->from || x.branches.size() != y->branches.size())
              return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i) {
              const auto & bx = x.branches[i];
              const auto & by = y->branches[i];
              if (bx.label != by.label || bx.binder != by.binder
                  || bx.annot != by.annot || !(bx.cont == by.cont))
                return false;
            }
            return true;
          },
          [&](const PLet & x) {
            auto y = b.as<PLet>();
            return y && x.binder == y->binder && x.rhs == y->rhs
                   && x.cont == y->cont;
          },
          [&](const PIf & x) {
            auto y = b.as<PIf>();
            return y && x.cond == y->cond && x.then_branch == y->then_branch
                   && x.else_branch == y->else_branch;
          },
          [&](const PRec & x) {
            auto y = b.as<PRec>();
            return y && x.var == y->var && x.body == y->body;
          },
          [&](const PVar & x) {
            auto y = b.as<PVar>();
            return y && x.name == y->name;
          },
          [&](const PEnd &) { return b.is_end(); },
      },
      a.node().kind);
}

std::string to_string(const Process & p)
{
  return std::visit(
      overloaded{
          [](const PSend & s) {
            return "send " + s.to.name + " " + s.label.name + "("
                   + to_string(s.payload) + "). " + to_string(s.cont);
          },
          [](const PRecv & r) {
            std::string out = "recv " + r.from.name + " { ";
            for (std::size_t i = 0; i < r.branches.size(); ++i) {
              const auto & b = r.branches[i];
              if (i) out += ", ";
              out += b.label.name + "(" + b.binder + ": "
                     + std::string(to_string(b.annot)) + "). " + to_string(b.cont);
            }
            return out + " }";
          },
          [](const PLet & l) {
            return "let " + l.binder + " = " + to_string(l.rhs) + " in "
                   + to_string(l.cont);
          },
          [](const PIf & i) {
            return "if " + to_string(i.cond) + " then " + to_string(i.then_branch)
                   + " else " + to_string(i.else_branch);
          },
          [](const PRec & r) { return "rec " + r.var + ". " + to_string(r.body); },
          [](const PVar & v) { return v.name; },
          [](const PEnd &) { return std::string("end"); },
      },
      p.node().kind);
}

std::string summary(const Process & p)
{
  return std::visit(
      overloaded{
          [](const PSend & s) {
            return "send " + s.to.name + " " + s.label.name + "("
                   + to_string(s.payload) + ")";
          },
          [](const PRecv & r) {
            std::string out = "recv " + r.from.name + " {";
            for (std::size_t i = 0; i < r.branches.size(); ++i) {
              if (i) out += ",";
              out += " " + r.branches[i].label.name;
            }
            return out + " }";
          },
          [](const PLet & l) { return "let " + l.binder + " = " + to_string(l.rhs); },
          [](const PIf & i) { return "if " + to_string(i.cond); },
          [](const PRec & r) { return "rec " + r.var; },
          [](const PVar & v) { return v.name; },
          [](const PEnd &) { return std::string("end"); },
      },
      p.node().kind);
}

std::size_t hash_session(const Session & s)
{
  std::size_t h = 307;
  for (const auto & [role, proc] : s) {
    h = hash_combine(h, hash_str(role.name));
    h = hash_combine(h, proc.hash());
  }
  return h;
}

// ---------------------------------------------------------------------------
// Substitution

GlobalType substitute_global(const GlobalType & g,
                             const std::string & x,
                             const GlobalType & replacement)
{
  return std::visit(
      overloaded{
          [&](const GComm & c) {
            std::vector<GBranch> branches;
            branches.reserve(c.branches.size());
            bool changed = false;
            for (const auto & b : c.branches) {
              GlobalType cont = substitute_global(b.cont, x, replacement);
              changed = changed || &cont.node() != &b.cont.node();
              branches.push_back({b.label, b.payload, std::move(cont)});
            }
            if (!changed) return g;
            return make_global({GComm{c.sender, c.receiver, std::move(branches)},
                                0, g.span()});
          },
          [&](const GMu & m) {
            if (m.var == x) return g;
            GlobalType body = substitute_global(m.body, x, replacement);
            if (&body.node() == &m.body.node()) return g;
            return make_global({GMu{m.var, std::move(body)}, 0, g.span()});
          },
          [&](const GVar & v) { return v.name == x ? replacement : g; },
          [&](const GEnd &) { return g; },
          [&](const GPar & p) {
            GlobalType l = substitute_global(p.left, x, replacement);
            GlobalType r = substitute_global(p.right, x, replacement);
            if (&l.node() == &p.left.node() && &r.node() == &p.right.node())
              return g;
            return make_global({GPar{std::move(l), std::move(r)}, 0, g.span()});
          },
      },
      g.node().kind);
}

namespace {

// Shared traversal for the two process substitutions. `on_leaf` rewrites
// PVar nodes, `on_expr` rewrites expressions, `binds` says whether a data
// binder or rec binder shadows the substituted name.
struct ProcessRewriter
{
  std::function<std::optional<Process>(const PVar &)> on_var;
  std::function<Expr(const Expr &)> on_expr;
  std::function<bool(const std::string &)> shadows_rec;
  std::function<bool(const std::string &)> shadows_data;

  Process operator()(const Process & p) const
  {
    return std::visit(
        overloaded{
            [&](const PSend & s) {
              return make_process(
                  {PSend{s.to, s.label, on_expr(s.payload), (*this)(s.cont)}, 0,
                   p.span()});
            },
            [&](const PRecv & r) {
              std::vector<PRecvBranch> branches;
              for (const auto & b : r.branches) {
                Process cont = shadows_data(b.binder) ? b.cont : (*this)(b.cont);
                branches.push_back({b.label, b.binder, b.annot, std::move(cont)});
              }
              return make_process({PRecv{r.from, std::move(branches)}, 0, p.span()});
            },
            [&](const PLet & l) {
              Process cont = shadows_data(l.binder) ? l.cont : (*this)(l.cont);
              return make_process(
                  {PLet{l.binder, on_expr(l.rhs), std::move(cont)}, 0, p.span()});
            },
            [&](const PIf & i) {
              return make_process({PIf{on_expr(i.cond), (*this)(i.then_branch),
                                       (*this)(i.else_branch)},
                                   0, p.span()});
            },
            [&](const PRec & r) {
              if (shadows_rec(r.var)) return p;
              return make_process({PRec{r.var, (*this)(r.body)}, 0, p.span()});
            },
            [&](const PVar & v) { return on_var(v).value_or(p); },
            [&](const PEnd &) { return p; },
        },
        p.node().kind);
  }
};

}  // namespace

Process substitute_process_rec(const Process & p,
                               const std::string & x,
                               const Process & replacement)
{
  ProcessRewriter rw{
      [&](const PVar & v) -> std::optional<Process> {
        if (v.name == x) return replacement;
        return std::nullopt;
      },
      [](const Expr & e) { return e; },
      [&](const std::string & name) { return name == x; },
      [](const std::string &) { return false; },
  };
  return rw(p);
}

Expr substitute_expr(const Expr & e, const std::string & x, const Value & v)
{
  return std::visit(
      overloaded{
          [&](const ELit &) { return e; },
          [&](const EVar & var) {
            return var.name == x ? Expr::literal(v, e.span()) : e;
          },
          [&](const EBinary & bin) {
            return Expr::binary(bin.op, substitute_expr(bin.lhs, x, v),
                                substitute_expr(bin.rhs, x, v), e.span());
          },
      },
      e.node().kind);
}

Process substitute_process_val(const Process & p,
                               const std::string & x,
                               const Value & v)
{
  ProcessRewriter rw{
      [](const PVar &) -> std::optional<Process> { return std::nullopt; },
      [&](const Expr & e) { return substitute_expr(e, x, v); },
      [](const std::string &) { return false; },
      [&](const std::string & name) { return name == x; },
  };
  return rw(p);
}

// ---------------------------------------------------------------------------
// Free variables, obj, roles

namespace {

void free_rec_vars_into(const GlobalType & g,
                        std::set<std::string> & bound,
                        std::set<std::string> & out)
{
  std::visit(overloaded{
                 [&](const GComm & c) {
                   for (const auto & b : c.branches) free_rec_vars_into(b.cont, bound, out);
                 },
                 [&](const GMu & m) {
                   bool fresh = bound.insert(m.var).second;
                   free_rec_vars_into(m.body, bound, out);
                   if (fresh) bound.erase(m.var);
                 },
                 [&](const GVar & v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const GEnd &) {},
                 [&](const GPar & p) {
                   free_rec_vars_into(p.left, bound, out);
                   free_rec_vars_into(p.right, bound, out);
                 },
             },
             g.node().kind);
}

void free_rec_vars_into(const Process & p,
                        std::set<std::string> & bound,
                        std::set<std::string> & out)
{
  std::visit(overloaded{
                 [&](const PSend & s) { free_rec_vars_into(s.cont, bound, out); },
                 [&](const PRecv & r) {
                   for (const auto & b : r.branches) free_rec_vars_into(b.cont, bound, out);
                 },
                 [&](const PLet & l) { free_rec_vars_into(l.cont, bound, out); },
                 [&](const PIf & i) {
                   free_rec_vars_into(i.then_branch, bound, out);
                   free_rec_vars_into(i.else_branch, bound, out);
                 },
                 [&](const PRec & r) {
                   bool fresh = bound.insert(r.var).second;
                   free_rec_vars_into(r.body, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
                 [&](const PVar & v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const PEnd &) {},
             },
             p.node().kind);
}

void free_data_vars_into(const Expr & e,
                         const std::multiset<std::string> & bound,
                         std::set<std::string> & out)
{
  std::visit(overloaded{
                 [&](const ELit &) {},
                 [&](const EVar & v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const EBinary & b) {
                   free_data_vars_into(b.lhs, bound, out);
                   free_data_vars_into(b.rhs, bound, out);
                 },
             },
             e.node().kind);
}

void free_data_vars_into(const Process & p,
                         std::multiset<std::string> & bound,
                         std::set<std::string> & out)
{
  auto under = [&](const std::string & binder, const Process & body) {
    auto it = bound.insert(binder);
    free_data_vars_into(body, bound, out);
    bound.erase(it);
  };
  std::visit(overloaded{
                 [&](const PSend & s) {
                   free_data_vars_into(s.payload, bound, out);
                   free_data_vars_into(s.cont, bound, out);
                 },
                 [&](const PRecv & r) {
                   for (const auto & b : r.branches) under(b.binder, b.cont);
                 },
                 [&](const PLet & l) {
                   free_data_vars_into(l.rhs, bound, out);
                   under(l.binder, l.cont);
                 },
                 [&](const PIf & i) {
                   free_data_vars_into(i.cond, bound, out);
                   free_data_vars_into(i.then_branch, bound, out);
                   free_data_vars_into(i.else_branch, bound, out);
                 },
                 [&](const PRec & r) { free_data_vars_into(r.body, bound, out); },
                 [&](const PVar &) {},
                 [&](const PEnd &) {},
             },
             p.node().kind);
}

}  // namespace

std::set<std::string> free_rec_vars(const GlobalType & g)
{
  std::set<std::string> bound, out;
  free_rec_vars_into(g, bound, out);
  return out;
}

std::set<std::string> free_rec_vars(const Process & p)
{
  std::set<std::string> bound, out;
  free_rec_vars_into(p, bound, out);
  return out;
}

std::set<std::string> free_data_vars(const Process & p)
{
  std::multiset<std::string> bound;
  std::set<std::string> out;
  free_data_vars_into(p, bound, out);
  return out;
}

std::set<std::string> free_data_vars(const Expr & e)
{
  std::set<std::string> out;
  free_data_vars_into(e, {}, out);
  return out;
}

std::optional<Role> obj(const Process & p)
{
  if (auto s = p.as<PSend>()) return s->to;
  if (auto r = p.as<PRecv>()) return r->from;
  return std::nullopt;
}

RoleSet roles_of(const GlobalType & g)
{
  RoleSet out;
  std::function<void(const GlobalType &)> walk = [&](const GlobalType & t) {
    std::visit(overloaded{
                   [&](const GComm & c) {
                     out.insert(c.sender);
                     out.insert(c.receiver);
                     for (const auto & b : c.branches) walk(b.cont);
                   },
                   [&](const GMu & m) { walk(m.body); },
                   [&](const GVar &) {},
                   [&](const GEnd &) {},
                   [&](const GPar & p) {
                     walk(p.left);
                     walk(p.right);
                   },
               },
               t.node().kind);
  };
  walk(g);
  return out;
}

// ---------------------------------------------------------------------------
// Well-formedness

std::string_view to_string(WellFormednessKind k)
{
  switch (k) {
    case WellFormednessKind::Unguarded: return "unguarded";
    case WellFormednessKind::UnboundVariable: return "unbound-variable";
    case WellFormednessKind::DuplicateLabel: return "duplicate-label";
    case WellFormednessKind::ParOverlap: return "par-overlap";
    case WellFormednessKind::ShadowedBinder: return "shadowed-binder";
    case WellFormednessKind::SelfCommunication: return "self-communication";
  }
  return "?";
}

namespace {

template <class Branches, class LabelOf>
void check_duplicate_labels(const Branches & branches,
                            LabelOf label_of,
                            const SourceSpan & span,
                            std::vector<WellFormednessViolation> & out)
{
  std::set<Label> seen;
  for (const auto & b : branches) {
    const Label & l = label_of(b);
    if (!seen.insert(l).second)
      out.push_back({WellFormednessKind::DuplicateLabel,
                     "duplicate branch label " + l.name, span});
  }
}

// `bound` holds every enclosing binder; `unguarded` those not yet separated
// from the current position by a communication.
void wf_global(const GlobalType & g,
               std::set<std::string> & bound,
               std::set<std::string> unguarded,
               std::vector<WellFormednessViolation> & out)
{
  std::visit(
      overloaded{
          [&](const GComm & c) {
            if (c.sender == c.receiver)
              out.push_back({WellFormednessKind::SelfCommunication,
                             "role " + c.sender.name + " communicates with itself",
                             g.span()});
            check_duplicate_labels(
                c.branches, [](const GBranch & b) -> const Label & { return b.label; },
                g.span(), out);
            for (const auto & b : c.branches) wf_global(b.cont, bound, {}, out);
          },
          [&](const GMu & m) {
            if (bound.count(m.var)) {
              out.push_back({WellFormednessKind::ShadowedBinder,
                             "recursion variable " + m.var + " is already bound",
                             g.span()});
              wf_global(m.body, bound, unguarded, out);
              return;
            }
            bound.insert(m.var);
            unguarded.insert(m.var);
            wf_global(m.body, bound, unguarded, out);
            bound.erase(m.var);
          },
          [&](const GVar & v) {
            if (!bound.count(v.name))
              out.push_back({WellFormednessKind::UnboundVariable,
                             "recursion variable " + v.name + " is unbound",
                             g.span()});
            else if (unguarded.count(v.name))
              out.push_back({WellFormednessKind::Unguarded,
                             "recursion variable " + v.name
                                 + " is not guarded by a communication",
                             g.span()});
          },
          [&](const GEnd &) {},
          [&](const GPar & p) {
            RoleSet l = roles_of(p.left), r = roles_of(p.right);
            for (const auto & role : l)
              if (r.count(role))
                out.push_back({WellFormednessKind::ParOverlap,
                               "role " + role.name
                                   + " occurs on both sides of a parallel composition",
                               g.span()});
            wf_global(p.left, bound, unguarded, out);
            wf_global(p.right, bound, unguarded, out);
          },
      },
      g.node().kind);
}

void wf_expr(const Expr & e,
             const std::multiset<std::string> & data,
             std::vector<WellFormednessViolation> & out)
{
  for (const auto & name : free_data_vars(e))
    if (!data.count(name))
      out.push_back({WellFormednessKind::UnboundVariable,
                     "variable " + name + " is unbound", e.span()});
}

void wf_process(const Process & p,
                std::set<std::string> & bound,
                std::set<std::string> unguarded,
                std::multiset<std::string> & data,
                std::vector<WellFormednessViolation> & out)
{
  auto under = [&](const std::string & binder, const Process & body,
                   const std::set<std::string> & ung) {
    auto it = data.insert(binder);
    wf_process(body, bound, ung, data, out);
    data.erase(it);
  };
  std::visit(
      overloaded{
          [&](const PSend & s) {
            wf_expr(s.payload, data, out);
            wf_process(s.cont, bound, {}, data, out);
          },
          [&](const PRecv & r) {
            check_duplicate_labels(
                r.branches,
                [](const PRecvBranch & b) -> const Label & { return b.label; },
                p.span(), out);
            for (const auto & b : r.branches) under(b.binder, b.cont, {});
          },
          [&](const PLet & l) {
            wf_expr(l.rhs, data, out);
            under(l.binder, l.cont, unguarded);
          },
          [&](const PIf & i) {
            wf_expr(i.cond, data, out);
            wf_process(i.then_branch, bound, unguarded, data, out);
            wf_process(i.else_branch, bound, unguarded, data, out);
          },
          [&](const PRec & r) {
            if (bound.count(r.var)) {
              out.push_back({WellFormednessKind::ShadowedBinder,
                             "recursion variable " + r.var + " is already bound",
                             p.span()});
              wf_process(r.body, bound, unguarded, data, out);
              return;
            }
            bound.insert(r.var);
            unguarded.insert(r.var);
            wf_process(r.body, bound, unguarded, data, out);
            bound.erase(r.var);
          },
          [&](const PVar & v) {
            if (!bound.count(v.name))
              out.push_back({WellFormednessKind::UnboundVariable,
                             "recursion variable " + v.name + " is unbound",
                             p.span()});
            else if (unguarded.count(v.name))
              out.push_back({WellFormednessKind::Unguarded,
                             "recursion variable " + v.name
                                 + " is not guarded by a send or receive",
                             p.span()});
          },
          [&](const PEnd &) {},
      },
      p.node().kind);
}

}  // namespace

std::vector<WellFormednessViolation> check_wellformed_global(const GlobalType & g)
{
  std::vector<WellFormednessViolation> out;
  std::set<std::string> bound;
  wf_global(g, bound, {}, out);
  return out;
}

std::vector<WellFormednessViolation> check_wellformed_process(const Process & p)
{
  std::vector<WellFormednessViolation> out;
  std::set<std::string> bound;
  std::multiset<std::string> data;
  wf_process(p, bound, {}, data, out);
  return out;
}

bool is_message_guarded(const Process & p)
{
  auto violations = check_wellformed_process(p);
  return std::none_of(violations.begin(), violations.end(), [](const auto & v) {
    return v.kind == WellFormednessKind::Unguarded;
  });
}

}  // namespace synmpst
