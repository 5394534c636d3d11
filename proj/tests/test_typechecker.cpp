#include <doctest.h>

#include <json.hpp>

#include "support.hpp"

using namespace testing;

namespace {

std::vector<StateId> ids(std::initializer_list<int> gs)
{
  std::vector<StateId> out;
  for (int g : gs) out.push_back(ring_state(g));
  std::sort(out.begin(), out.end());
  return out;
}

bool has_error(const SessionCheck & r, TypeErrorKind kind, const char * role)
{
  for (const auto & e : r.errors)
    if (e.kind == kind && e.role == Role{role}) return true;
  return false;
}

std::string outcome_text(const Mlts & m, const Outcome<DerivationPtr> & o)
{
  if (auto e = std::get_if<TypeError>(&o)) return error_to_string(m, *e);
  return render_derivation(m, *std::get<DerivationPtr>(o));
}

// a -> d then b -> c, without the overtaking edge a global type would add.
Mlts causal_chain()
{
  Mlts m;
  m.state_names = {"s0", "s1", "s2"};
  m.graph = TransitionGraph(3, StateId{0},
                            {{StateId{0}, act("a", "d", "L"), StateId{1}},
                             {StateId{1}, act("b", "c", "N"), StateId{2}}});
  return m;
}

}  // namespace

TEST_CASE("expression typing")
{
  const DataEnv x{{"x", PayloadType::Nat}};
  auto nat = [](std::uint64_t n) { return Expr::literal(Value::nat(n)); };
  CHECK(std::get<PayloadType>(type_expr({}, Expr::binary(BinaryOp::Add, nat(5), nat(1))))
        == PayloadType::Nat);
  CHECK(std::get<PayloadType>(type_expr(x, Expr::binary(BinaryOp::Add, Expr::var("x"), nat(1))))
        == PayloadType::Nat);
  CHECK(std::get<PayloadType>(type_expr({}, Expr::binary(BinaryOp::Eq, nat(2), nat(3))))
        == PayloadType::Bool);
  CHECK(std::get<PayloadType>(type_expr({}, Expr::literal(Value::str("s")))) == PayloadType::Str);

  auto mixed = type_expr({}, Expr::binary(BinaryOp::Add, nat(5), Expr::literal(Value::integer(1))));
  REQUIRE(failed(mixed));
  CHECK(std::get<TypeError>(mixed).kind == TypeErrorKind::ExprIllTyped);
  auto cmp = type_expr({}, Expr::binary(BinaryOp::Eq, nat(1), Expr::literal(Value::boolean(true))));
  REQUIRE(failed(cmp));
  CHECK(std::get<TypeError>(cmp).kind == TypeErrorKind::ExprIllTyped);
  auto unbound = type_expr(x, Expr::var("y"));
  REQUIRE(failed(unbound));
  CHECK(std::get<TypeError>(unbound).kind == TypeErrorKind::UnboundVar);

  // The innermost binding wins.
  const DataEnv shadow{{"x", PayloadType::Nat}, {"x", PayloadType::Str}};
  CHECK(std::get<PayloadType>(type_expr(shadow, Expr::var("x"))) == PayloadType::Str);
}

TEST_CASE("skip obligations on Ring")
{
  Mlts m = ring_named();
  TypeChecker tc(m);
  ProtocolFile f = load_corpus("ring.smpst");
  const Process & alice = corpus_process(f, "Alice");
  const Process & alice_recv = alice.as<PSend>()->cont;
  const Process & carol = corpus_process(f, "Carol");

  auto a2 = tc.try_skip(Role{"a"}, alice_recv, ring_state(2));
  REQUIRE_FALSE(failed(a2));
  CHECK(std::get<std::vector<StateId>>(a2) == ids({3}));

  auto c1 = tc.try_skip(Role{"c"}, carol, ring_state(1));
  REQUIRE_FALSE(failed(c1));
  CHECK(std::get<std::vector<StateId>>(c1) == ids({2, 5}));

  auto a3 = tc.try_skip(Role{"a"}, alice_recv, ring_state(3));
  REQUIRE(failed(a3));
  CHECK(std::get<TypeError>(a3).kind == TypeErrorKind::SkipFailed);
  CHECK(std::get<TypeError>(a3).premise == 1);

  // Bob has nothing left to do once c has the number.
  Process late = p_send(Role{"c"}, Label{"App"}, Expr::literal(Value::nat(1)), p_end());
  auto b6 = tc.try_skip(Role{"b"}, late, ring_state(6));
  REQUIRE(failed(b6));
  CHECK(std::get<TypeError>(b6).premise == 2);

  auto end = tc.try_skip(Role{"a"}, p_end(), ring_state(2));
  REQUIRE(failed(end));
  CHECK(std::get<TypeError>(end).premise == 1);
}

TEST_CASE("skipping needs a causal link to the next partner")
{
  Mlts m = causal_chain();
  TypeChecker tc(m);
  Process carol = p_recv(Role{"b"}, {{Label{"N"}, "_", PayloadType::Unit, p_end()}});
  auto r = tc.try_skip(Role{"c"}, carol, StateId{0});
  REQUIRE(failed(r));
  CHECK(std::get<TypeError>(r).premise == 4);
  CHECK(failed(tc.type_process({}, {}, Role{"c"}, carol, StateId{0})));
  // Once b -> c is the next transition the receive is typed directly.
  CHECK_FALSE(failed(tc.type_process({}, {}, Role{"c"}, carol, StateId{1})));
}

TEST_CASE("every corpus session is well typed")
{
  for (const auto & c : positive_sessions()) {
    CAPTURE(c.session);
    Mlts m = case_spec(c);
    SessionCheck r = type_session(m, case_session(c));
    for (const auto & e : r.errors) CAPTURE(error_to_string(m, e));
    CHECK(r.ok());
    CHECK(r.derivations.size() == case_session(c).size());
  }
}

TEST_CASE("the wrong-payload and wrong-action Ring variants are rejected")
{
  Mlts m = ring_named();
  auto bad = load_corpus("negative/ring_badpayload.smpst");
  SessionCheck r1 = type_session(m, bad.build_session(bad.sessions.at(0)));
  CHECK(has_error(r1, TypeErrorKind::PayloadMismatch, "a"));

  auto wrong = load_corpus("negative/ring_wrongaction.smpst");
  SessionCheck r2 = type_session(m, wrong.build_session(wrong.sessions.at(0)));
  CHECK(has_error(r2, TypeErrorKind::UnexpectedSend, "a"));
}

TEST_CASE("no candidate for Carol inhabits Confusion")
{
  ProtocolFile f = load_corpus("negative/confusion.smpst");
  Mlts m = corpus_spec("negative/confusion.smpst", "Confusion");
  for (const char * name : {"confusion_foo", "confusion_bar"}) {
    CAPTURE(name);
    SessionCheck r = type_session(m, f.build_session(*f.find_session(name)));
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, TypeErrorKind::UnexpectedSend, "c"));
    for (const auto & e : r.errors) CHECK(e.role == Role{"c"});
  }
}

TEST_CASE("a role active at the initial state must be implemented")
{
  Session s = corpus_session("ring.smpst", "ring");
  s.erase(Role{"c"});
  SessionCheck r = type_session(ring_named(), s);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].kind == TypeErrorKind::RoleUnimplemented);
  CHECK(r.errors[0].role == Role{"c"});

  Session full = corpus_session("ring.smpst", "ring");
  SessionCheck extra = type_session(ring_named(), full, {Role{"z"}});
  CHECK(has_error(extra, TypeErrorKind::RoleUnimplemented, "z"));
}

TEST_CASE("Dave's loop is typed through the relaxed variable rule")
{
  ProtocolFile f = load_corpus("lasso.smpst");
  Mlts m = corpus_spec("lasso.smpst", "Lasso");
  const Process & dave = corpus_process(f, "Dave");

  TypeChecker relaxed(m);
  auto ok = relaxed.type_process({}, {}, Role{"d"}, dave, m.initial());
  REQUIRE_FALSE(failed(ok));
  CHECK(std::get<DerivationPtr>(ok)->rule == Rule::Rec);
  CHECK(render_derivation(m, *std::get<DerivationPtr>(ok)).find("Var") != std::string::npos);

  CheckOptions strict;
  strict.strict_var = true;
  TypeChecker strict_checker(m, strict);
  auto bad = strict_checker.type_process({}, {}, Role{"d"}, dave, m.initial());
  REQUIRE(failed(bad));
  CHECK(std::get<TypeError>(bad).kind == TypeErrorKind::VarStateUnreachable);

  CHECK(type_session(m, corpus_session("lasso.smpst", "lasso")).ok());
  CHECK_FALSE(type_session(m, corpus_session("lasso.smpst", "lasso"), {}, strict).ok());
}

TEST_CASE("the Diamond processes are typed against the hand-written MLTS")
{
  Mlts m = load_corpus_mlts("diamond.mlts.json");
  CHECK(check_well_behaved(m).empty());
  SessionCheck r = type_session(m, corpus_session("diamond.smpst", "diamond"));
  CHECK(r.ok());
  CHECK(r.derivations.size() == 3);
}

TEST_CASE("structural rules")
{
  Mlts m = ring_named();
  TypeChecker tc(m);
  const Role a{"a"};
  // end is only allowed once a has nothing left to do.
  CHECK_FALSE(failed(tc.type_process({}, {}, a, p_end(), ring_state(4))));
  auto early = tc.type_process({}, {}, a, p_end(), ring_state(6));
  REQUIRE(failed(early));
  CHECK(std::get<TypeError>(early).kind == TypeErrorKind::NotTerminable);

  Process alice = corpus_process(load_corpus("ring.smpst"), "Alice");
  Process guarded = p_if(Expr::literal(Value::boolean(true)), alice, alice);
  auto d = tc.type_process({}, {}, a, guarded, ring_state(1));
  REQUIRE_FALSE(failed(d));
  CHECK(std::get<DerivationPtr>(d)->rule == Rule::If);

  auto non_bool = tc.type_process({}, {}, a, p_if(Expr::literal(Value::nat(1)), alice, alice),
                                  ring_state(1));
  REQUIRE(failed(non_bool));
  CHECK(std::get<TypeError>(non_bool).kind == TypeErrorKind::ExprIllTyped);

  auto free_var = tc.type_process({}, {}, a, p_var("X"), ring_state(1));
  REQUIRE(failed(free_var));
  CHECK(std::get<TypeError>(free_var).kind == TypeErrorKind::UnboundVar);

  // A receive must accept every label the state offers.
  const Process bob = corpus_process(load_corpus("ring.smpst"), "Bob");
  Process narrow = p_recv(Role{"a"}, {bob.as<PRecv>()->branches.at(1)});
  auto missing = tc.type_process({}, {}, Role{"b"}, narrow, ring_state(1));
  REQUIRE(failed(missing));
  CHECK(std::get<TypeError>(missing).kind == TypeErrorKind::MissingRecvBranch);
}

TEST_CASE("send/receive rules and Skip never both apply")
{
  std::mt19937_64 rng(5);
  std::size_t checked = 0;
  for (const auto & c : positive_sessions()) {
    Mlts m = case_spec(c);
    TypeChecker tc(m);
    for (std::uint32_t s = 0; s < m.graph.num_states(); ++s) {
      for (const auto & t : m.graph.out(StateId{s})) {
        // Both endpoints of an outgoing transition have a matching rule
        // candidate and must therefore fail premise 1.
        Process send = p_send(t.action.receiver, t.action.label, Expr(), p_end());
        Process recv = p_recv(t.action.sender, {{t.action.label, "x", t.action.payload, p_end()}});
        for (auto [role, p] : {std::pair{t.action.sender, send}, std::pair{t.action.receiver, recv}}) {
          auto r = tc.try_skip(role, p, StateId{s});
          REQUIRE(failed(r));
          CHECK(std::get<TypeError>(r).premise == 1);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("checking is deterministic")
{
  for (const auto & c : positive_sessions()) {
    Mlts m = case_spec(c);
    Session s = case_session(c);
    SessionCheck r1 = type_session(m, s);
    SessionCheck r2 = type_session(m, s);
    REQUIRE(r1.derivations.size() == r2.derivations.size());
    for (const auto & [role, d] : r1.derivations)
      CHECK(render_derivation(m, *d) == render_derivation(m, *r2.derivations.at(role)));
  }
  Mlts m = ring_named();
  auto bad = load_corpus("negative/ring_badpayload.smpst");
  Session s = bad.build_session(bad.sessions.at(0));
  CHECK(errors_to_json(m, type_session(m, s).errors) == errors_to_json(m, type_session(m, s).errors));
  TypeChecker t1(m), t2(m);
  for (const auto & j : ring_judgements())
    CHECK(outcome_text(m, t1.type_process(j.gamma, {}, j.role, j.process, ring_state(j.g)))
          == outcome_text(m, t2.type_process(j.gamma, {}, j.role, j.process, ring_state(j.g))));
}

TEST_CASE("errors serialise to JSON")
{
  Mlts m = ring_named();
  auto bad = load_corpus("negative/ring_badpayload.smpst");
  auto r = type_session(m, bad.build_session(bad.sessions.at(0)));
  auto j = nlohmann::json::parse(errors_to_json(m, r.errors));
  REQUIRE(j.is_array());
  REQUIRE_FALSE(j.empty());
  for (const char * key : {"severity", "kind", "role", "state", "span", "message"})
    CHECK(j[0].contains(key));
  CHECK(j[0]["severity"] == "error");
  CHECK(j[0]["kind"] == "PayloadMismatch");
  CHECK(j[0]["role"] == "a");
  CHECK(j[0]["state"] == "G1");
}
