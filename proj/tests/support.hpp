// Shared fixtures for the test suites: corpus loading, the Ring specification
// with its conventional state names, and term builders.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "synmpst/global_lts.hpp"
#include "synmpst/mlts.hpp"
#include "synmpst/parser.hpp"
#include "synmpst/syntax.hpp"
#include "synmpst/typechecker.hpp"

namespace testing {

using namespace synmpst;

std::string corpus_path(const std::string & name);
std::string golden_path(const std::string & name);
std::string slurp(const std::string & path);

/// Parses a corpus file and fails loudly on any diagnostic.
ProtocolFile load_corpus(const std::string & name);
Mlts load_corpus_mlts(const std::string & name);

/// The MLTS of a global declared in a corpus file.
Mlts corpus_spec(const std::string & file, const std::string & global);
Session corpus_session(const std::string & file, const std::string & session);

GlobalAction act(const std::string & from,
                 const std::string & to,
                 const std::string & label,
                 PayloadType t = PayloadType::Unit);

/// Ring LTS with states named G1..G6 as in the usual figure.
Mlts ring_named();
StateId ring_state(int g);  // G1..G6 -> discovery id

/// A well-typed session of the corpus and the specification it is checked
/// against: the LTS of its global, or the companion MLTS file.
struct CorpusCase
{
  std::string file;
  std::string session;
  std::string global;
  std::string mlts;  // companion file, empty when the global is declared
};

const std::vector<CorpusCase> & positive_sessions();
Mlts case_spec(const CorpusCase & c);
Session case_session(const CorpusCase & c);

/// One of the twelve worked judgements on Ring: the role's process at a
/// state, with the expected rule at the root.
struct RingJudgement
{
  std::string name;  // golden file stem
  Role role;
  DataEnv gamma;
  Process process;
  int g;  // state G1..G6
  Rule rule;
  std::vector<int> obligations;  // Skip targets, as G numbers
};

std::vector<RingJudgement> ring_judgements();

const Process & corpus_process(const ProtocolFile & f, const std::string & name);

}  // namespace testing
