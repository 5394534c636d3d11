// Independent reference implementations used to cross-check the library.
// They favour directness over speed and share no code with src/.

#pragma once

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synmpst/mlts.hpp"
#include "synmpst/syntax.hpp"

namespace oracle {

using namespace synmpst;

/// Single steps of a global type without recursion or parallel composition,
/// by plain structural recursion. Each step is rendered as
/// "action => target" and the result is sorted.
std::vector<std::string> naive_step(const GlobalType & g);

/// Random global type built only from communications and end.
GlobalType random_finite_global(std::mt19937_64 & rng, int depth, int num_roles);

/// Random MLTS over roles a..d with labels L0/L1.
Mlts random_mlts(std::mt19937_64 & rng, int max_states, int max_transitions);

/// Boolean reachability matrix of the relation "s can step to t by an
/// action that avoids every role in `roles`", closed reflexively and
/// transitively by Warshall's algorithm.
std::vector<std::vector<bool>> closure_without(const Mlts & m, const RoleSet & roles);
/// As above, but a state only steps if no role of `roles` is enabled there.
std::vector<std::vector<bool>> closure_strong_without(const Mlts & m, const RoleSet & roles);

/// Pairs (condition, state) at which the definition of well-behavedness is
/// violated, computed by enumerating tuples of transitions.
std::set<std::pair<WbCondition, std::uint32_t>> wb_failures(const Mlts & m);

/// Random process over roles a/b, labels L0/L1, recursion variables X/Y
/// and data variables x/y/z. Variables may occur free.
Process random_process(std::mt19937_64 & rng, int depth);
/// Random global type over roles r0..r2 whose recursion variables X/Y may
/// occur free.
GlobalType random_open_global(std::mt19937_64 & rng, int depth);

}  // namespace oracle
