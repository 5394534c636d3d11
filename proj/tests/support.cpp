#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testing {

std::string corpus_path(const std::string & name)
{
  return std::string(SYNMPST_CORPUS_DIR) + "/" + name;
}

std::string golden_path(const std::string & name)
{
  return std::string(SYNMPST_GOLDEN_DIR) + "/" + name;
}

std::string slurp(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ProtocolFile load_corpus(const std::string & name)
{
  const std::string path = corpus_path(name);
  ParseOptions opts;
  opts.require_session_globals = name.rfind("diamond", 0) != 0;
  auto r = parse_file(slurp(path), path, opts);
  if (!r.ok()) {
    std::string msg = "cannot load " + path;
    for (const auto & d : r.diagnostics) msg += "\n" + to_string(d);
    throw std::runtime_error(msg);
  }
  return *r.file;
}

Mlts load_corpus_mlts(const std::string & name)
{
  const std::string path = corpus_path(name);
  auto r = parse_mlts(slurp(path), path);
  if (!r.ok()) throw std::runtime_error("cannot load " + path);
  return *r.mlts;
}

Mlts corpus_spec(const std::string & file, const std::string & global)
{
  ProtocolFile f = load_corpus(file);
  const auto * g = f.find_global(global);
  if (!g) throw std::runtime_error("no global " + global + " in " + file);
  return as_mlts(build_lts(g->type));
}

Session corpus_session(const std::string & file, const std::string & session)
{
  ProtocolFile f = load_corpus(file);
  const auto * s = f.find_session(session);
  if (!s) throw std::runtime_error("no session " + session + " in " + file);
  return f.build_session(*s);
}

GlobalAction act(const std::string & from,
                 const std::string & to,
                 const std::string & label,
                 PayloadType t)
{
  return GlobalAction{Role{from}, Role{to}, Label{label}, t};
}

// Breadth-first discovery visits G1, then both successors of G1 in branch
// order (G2, G5), then G3, G6, and finally G4.
StateId ring_state(int g)
{
  static const std::uint32_t ids[] = {0, 0, 1, 3, 5, 2, 4};
  return StateId{ids[g]};
}

Mlts ring_named()
{
  Mlts m = corpus_spec("ring.smpst", "Ring");
  for (int g = 1; g <= 6; ++g) m.state_names[ring_state(g).value] = "G" + std::to_string(g);
  return m;
}

const Process & corpus_process(const ProtocolFile & f, const std::string & name)
{
  const auto * p = f.find_process(name);
  if (!p) throw std::runtime_error("no process " + name);
  return p->process;
}

const std::vector<CorpusCase> & positive_sessions()
{
  static const std::vector<CorpusCase> cases = {
      {"ring.smpst", "ring", "Ring", ""},
      {"lasso.smpst", "lasso", "Lasso", ""},
      {"com2.smpst", "com2", "Com2", ""},
      {"diamond.smpst", "diamond", "Diamond", "diamond.mlts.json"},
      {"oauth2.smpst", "oauth2", "OAuth2", ""},
      {"two_buyers.smpst", "two_buyers", "TwoBuyers", ""},
      {"map_reduce.smpst", "map_reduce", "MapReduce", ""},
      {"workers.smpst", "workers", "Workers", ""},
  };
  return cases;
}

Mlts case_spec(const CorpusCase & c)
{
  if (!c.mlts.empty()) return load_corpus_mlts(c.mlts);
  return corpus_spec(c.file, c.global);
}

Session case_session(const CorpusCase & c)
{
  return corpus_session(c.file, c.session);
}

std::vector<RingJudgement> ring_judgements()
{
  ProtocolFile f = load_corpus("ring.smpst");
  const Process & alice = corpus_process(f, "Alice");
  const Process & bob = corpus_process(f, "Bob");
  const Process & carol = corpus_process(f, "Carol");
  const Process & alice_recv = alice.as<PSend>()->cont;
  const Process & alice_end = alice_recv.as<PRecv>()->branches.at(0).cont;
  const auto & bob_branches = bob.as<PRecv>()->branches;
  const auto & carol_branches = carol.as<PRecv>()->branches;
  const Role a{"a"}, b{"b"}, c{"c"};
  const DataEnv none;
  const DataEnv z{{"z", PayloadType::Nat}};
  const DataEnv x{{"x", PayloadType::Nat}};
  const DataEnv y{{"y", PayloadType::Nat}};
  return {
      {"ring_alice_end_g4", a, z, alice_end, 4, Rule::End, {}},
      {"ring_alice_recv_g3", a, none, alice_recv, 3, Rule::Recv, {}},
      {"ring_alice_skip_g2", a, none, alice_recv, 2, Rule::Skip, {3}},
      {"ring_alice_send_g1", a, none, alice, 1, Rule::Send, {}},
      {"ring_bob_send_g2", b, x, bob_branches.at(0).cont, 2, Rule::Send, {}},
      {"ring_bob_send_g5", b, x, bob_branches.at(1).cont, 5, Rule::Send, {}},
      {"ring_bob_recv_g1", b, none, bob, 1, Rule::Recv, {}},
      {"ring_carol_send_g3", c, y, carol_branches.at(0).cont, 3, Rule::Send, {}},
      {"ring_carol_let_g6", c, y, carol_branches.at(1).cont, 6, Rule::Let, {}},
      {"ring_carol_recv_g2", c, none, carol, 2, Rule::Recv, {}},
      {"ring_carol_recv_g5", c, none, carol, 5, Rule::Recv, {}},
      {"ring_carol_skip_g1", c, none, carol, 1, Rule::Skip, {2, 5}},
  };
}

}  // namespace testing
