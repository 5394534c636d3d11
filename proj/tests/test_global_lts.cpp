#include <doctest.h>

#include <algorithm>
#include <json.hpp>

#include "oracles.hpp"
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

std::vector<Step> steps(std::initializer_list<std::pair<GlobalAction, int>> xs)
{
  std::vector<Step> out;
  for (const auto & [a, g] : xs) out.push_back({a, ring_state(g)});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Step> sorted(std::vector<Step> v)
{
  std::sort(v.begin(), v.end());
  return v;
}

RoleSet roles(std::initializer_list<const char *> rs)
{
  RoleSet out;
  for (const char * r : rs) out.insert(Role{r});
  return out;
}

}  // namespace

TEST_CASE("the Ring LTS has the six states and transitions of its figure")
{
  Mlts m = ring_named();
  CHECK(m.graph.num_states() == 6);
  const auto nat = PayloadType::Nat;
  std::vector<std::string> edges;
  for (const auto & t : m.graph.transitions())
    edges.push_back(m.name(t.from) + " " + to_string(t.action) + " " + m.name(t.to));
  std::sort(edges.begin(), edges.end());
  std::vector<std::string> expected = {
      "G1 " + to_string(act("a", "b", "AppThenGet", nat)) + " G2",
      "G1 " + to_string(act("a", "b", "App", nat)) + " G5",
      "G2 " + to_string(act("b", "c", "AppThenGet", nat)) + " G3",
      "G5 " + to_string(act("b", "c", "App", nat)) + " G6",
      "G6 " + to_string(act("a", "c", "Get")) + " G3",
      "G3 " + to_string(act("c", "a", "Val", nat)) + " G4",
  };
  std::sort(expected.begin(), expected.end());
  CHECK(edges == expected);
  CHECK(m.initial() == ring_state(1));
}

TEST_CASE("step on Ring, end and the Lasso loop")
{
  ProtocolFile ring = load_corpus("ring.smpst");
  const GlobalType & g = ring.find_global("Ring")->type;
  auto s = step(g);
  REQUIRE(s.size() == 2);
  CHECK(s[0].first == act("a", "b", "AppThenGet", PayloadType::Nat));
  CHECK(s[1].first == act("a", "b", "App", PayloadType::Nat));
  CHECK(s[0].second == g.as<GComm>()->branches[0].cont);

  CHECK(step(g_end()).empty());

  ProtocolFile lasso = load_corpus("lasso.smpst");
  const GlobalType & loop = lasso.find_global("Lasso")->type.as<GComm>()->branches[0].cont;
  REQUIRE(loop.as<GMu>());
  auto ls = step(loop);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].first == act("b", "c", "Foo"));
  CHECK(ls[0].second == g_msg(Role{"b"}, Role{"d"}, Label{"Foo"}, PayloadType::Unit, loop));
}

TEST_CASE("independent communications overtake their prefix")
{
  ProtocolFile f = load_corpus("com2.smpst");
  const GlobalType & g = f.find_global("Com2")->type;
  auto first = step(g);
  REQUIRE(first.size() == 1);
  CHECK(first[0].first == act("a", "b1", "Foo"));
  std::vector<GlobalAction> next;
  for (const auto & [a, t] : step(first[0].second)) next.push_back(a);
  CHECK(next.size() == 2);
  CHECK(std::count(next.begin(), next.end(), act("a", "b2", "Foo")) == 1);
  CHECK(std::count(next.begin(), next.end(), act("b1", "c", "Bar")) == 1);
}

TEST_CASE("overtaking through a recursive continuation")
{
  // The loop's step overtakes c -> d and leads back to the same term.
  GlobalType loop = g_mu("X", g_msg(Role{"a"}, Role{"b"}, Label{"L"}, PayloadType::Unit, g_var("X")));
  GlobalType g = g_msg(Role{"c"}, Role{"d"}, Label{"M"}, PayloadType::Unit, loop);
  auto s = step(g);
  REQUIRE(s.size() == 2);
  CHECK(s[0].first == act("c", "d", "M"));
  CHECK(s[1].first == act("a", "b", "L"));
  CHECK(s[1].second == g_msg(Role{"c"}, Role{"d"}, Label{"M"}, PayloadType::Unit, loop));
}

TEST_CASE("parallel composition interleaves")
{
  GlobalType left = g_msg(Role{"a"}, Role{"b"}, Label{"L"}, PayloadType::Unit, g_end());
  GlobalType right = g_msg(Role{"c"}, Role{"d"}, Label{"R"}, PayloadType::Unit, g_end());
  GlobalLts lts = build_lts(g_par(left, right));
  CHECK(lts.store.size() == 4);
  CHECK(lts.graph.transitions().size() == 4);
}

TEST_CASE("build_lts sizes")
{
  CHECK(build_lts(g_end(), 1000).store.size() == 1);
  CHECK(build_lts(g_end(), 1000).graph.transitions().empty());
  GlobalLts lasso = build_lts(load_corpus("lasso.smpst").find_global("Lasso")->type, 1000);
  CHECK(lasso.store.size() == 3);
  CHECK(lasso.graph.transitions().size() == 3);
  GlobalLts workers = build_lts(load_corpus("workers.smpst").find_global("Workers")->type);
  CHECK(workers.store.size() < default_state_cap);
  for (const auto & t : workers.graph.transitions()) CHECK(t.to.value < workers.store.size());
}

TEST_CASE("the state cap is enforced")
{
  const GlobalType g = load_corpus("workers.smpst").find_global("Workers")->type;
  try {
    build_lts(g, 5);
    FAIL("expected StateCapExceeded");
  }
  catch (const StateCapExceeded & e) {
    CHECK(e.cap == 5);
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }
}

TEST_CASE("overtaking that never settles hits the term budget")
{
  // c -> d overtakes a -> b once per unfolding, so every state is one prefix
  // longer than the last.
  auto r = parse_file("global G = mu X. a -> b : L(Unit). c -> d : M(Unit). X;", "runaway.smpst");
  REQUIRE(r.ok());
  try {
    build_lts(r.file->globals.at(0).type, 2000);
    FAIL("expected StateCapExceeded");
  }
  catch (const StateCapExceeded & e) {
    CHECK(e.cap == 2000);
    CHECK(std::string(e.what()).find("overtaking") != std::string::npos);
  }
}

TEST_CASE("role-filtered steps on Ring")
{
  Mlts m = ring_named();
  const auto & g = m.graph;
  const auto nat = PayloadType::Nat;
  CHECK(g.step_with(ring_state(3), roles({"a"})) == steps({{act("c", "a", "Val", nat), 4}}));
  CHECK(g.step_with(ring_state(2), roles({"a"})).empty());
  CHECK(sorted(g.step_with(ring_state(1), {})) == sorted(g.out(ring_state(1))));

  CHECK(g.step_without(ring_state(2), roles({"a"}))
        == steps({{act("b", "c", "AppThenGet", nat), 3}}));
  CHECK(sorted(g.step_without(ring_state(1), roles({"c"})))
        == steps({{act("a", "b", "AppThenGet", nat), 2}, {act("a", "b", "App", nat), 5}}));
  CHECK(g.step_without(ring_state(4), roles({"a"})).empty());

  CHECK(sorted(g.strong_step_without(ring_state(1), roles({"c"})))
        == steps({{act("a", "b", "AppThenGet", nat), 2}, {act("a", "b", "App", nat), 5}}));
  CHECK(g.strong_step_without(ring_state(3), roles({"a"})).empty());
  CHECK(g.strong_step_without(ring_state(4), roles({"a"})).empty());
}

TEST_CASE("reachability and activity on Ring")
{
  Mlts m = ring_named();
  const auto & g = m.graph;
  CHECK(g.reach_without(ring_state(1), roles({"a"})) == ids({1}));
  CHECK(g.reach_without(ring_state(2), roles({"a"})) == ids({2, 3}));
  CHECK(g.reach_without(ring_state(4), {}) == ids({4}));
  CHECK(g.reach_without(ring_state(1), roles({"c"})) == ids({1, 2, 5}));
  CHECK(g.reach_strong_without(ring_state(1), roles({"c"})) == ids({1, 2, 5}));

  CHECK_FALSE(g.enabled(ring_state(1), Role{"c"}));
  CHECK(g.active(ring_state(1), Role{"c"}));
  CHECK_FALSE(g.enabled(ring_state(6), Role{"b"}));
  CHECK_FALSE(g.active(ring_state(6), Role{"b"}));
  CHECK_FALSE(g.active(ring_state(1), Role{"z"}));
  CHECK(g.roles() == roles({"a", "b", "c"}));
}

TEST_CASE("transition graphs reject dangling endpoints")
{
  CHECK_THROWS_AS(TransitionGraph(1, StateId{0}, {{StateId{0}, act("a", "b", "L"), StateId{1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransitionGraph(1, StateId{3}, {}), std::invalid_argument);
}

TEST_CASE("step agrees with structural recursion on finite global types")
{
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 600; ++i) {
    GlobalType g = oracle::random_finite_global(rng, 5, 4);
    std::vector<std::string> got;
    for (const auto & [a, t] : step(g)) got.push_back(to_string(a) + " => " + to_string(t));
    std::sort(got.begin(), got.end());
    CAPTURE(to_string(g));
    REQUIRE(got == oracle::naive_step(g));
  }
}

TEST_CASE("closures agree with Warshall's algorithm")
{
  std::mt19937_64 rng(77);
  const RoleSet role_sets[] = {{}, roles({"a"}), roles({"b"}), roles({"a", "c"}), roles({"d", "b"})};
  for (int i = 0; i < 500; ++i) {
    Mlts m = oracle::random_mlts(rng, 7, 14);
    for (const auto & rs : role_sets) {
      auto w = oracle::closure_without(m, rs);
      auto sw = oracle::closure_strong_without(m, rs);
      for (std::uint32_t s = 0; s < m.graph.num_states(); ++s) {
        std::vector<StateId> expected, expected_strong;
        for (std::uint32_t t = 0; t < m.graph.num_states(); ++t) {
          if (w[s][t]) expected.push_back(StateId{t});
          if (sw[s][t]) expected_strong.push_back(StateId{t});
        }
        REQUIRE(m.graph.reach_without(StateId{s}, rs) == expected);
        REQUIRE(m.graph.reach_strong_without(StateId{s}, rs) == expected_strong);
      }
    }
  }
}

TEST_CASE("role filters partition steps for single roles")
{
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    Mlts m = oracle::random_mlts(rng, 5, 10);
    for (std::uint32_t s = 0; s < m.graph.num_states(); ++s)
      for (const char * r : {"a", "b", "c", "d"}) {
        RoleSet rs{Role{r}};
        auto with = m.graph.step_with(StateId{s}, rs);
        auto without = m.graph.step_without(StateId{s}, rs);
        std::vector<Step> all = with;
        all.insert(all.end(), without.begin(), without.end());
        REQUIRE(sorted(all) == sorted(m.graph.out(StateId{s})));
        if (!m.graph.strong_step_without(StateId{s}, rs).empty()) REQUIRE(with.empty());
        REQUIRE(m.graph.enabled(StateId{s}, Role{r}) == !with.empty());
      }
  }
}

TEST_CASE("DOT and JSON export")
{
  GlobalLts lts = build_lts(load_corpus("ring.smpst").find_global("Ring")->type);
  const std::string dot = lts_to_dot(lts);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(std::count(dot.begin(), dot.end(), '\n') > 12);
  int nodes = 0, edges = 0;
  for (std::size_t pos = 0; (pos = dot.find("\n  s", pos)) != std::string::npos; ++pos) {
    std::size_t eol = dot.find('\n', pos + 1);
    std::string line = dot.substr(pos + 1, eol - pos - 1);
    (line.find("->") != std::string::npos && line.find(" -> s") != std::string::npos ? edges : nodes)++;
  }
  CHECK(nodes == 6);
  CHECK(edges == 6);
  CHECK(dot.find("a->b:AppThenGet(Nat)") != std::string::npos);

  auto j = nlohmann::json::parse(lts_to_json(lts));
  CHECK(j["states"].size() == 6);
  CHECK(j["transitions"].size() == 6);
  CHECK(lts_to_json(lts) == lts_to_json(build_lts(load_corpus("ring.smpst").find_global("Ring")->type)));
}
