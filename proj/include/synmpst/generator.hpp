// Seeded random generation of well-formed global types, for property tests
// and benchmarks.

#pragma once

#include <cstdint>
#include <random>

#include "synmpst/syntax.hpp"

namespace synmpst {

struct GeneratorOptions
{
  int max_depth = 6;
  int num_roles = 4;     // roles are named r0, r1, ...
  int max_branches = 3;
  bool allow_par = true;  // only used when num_roles >= 4
};

/// A closed, guarded, well-formed global type. Recursion variables bound
/// outside a parallel composition never occur inside it, and the two sides
/// of a parallel composition use disjoint role sets. Within each side every
/// communication shares a role with the communication before it, so the LTS
/// is finite and well-behaved.
GlobalType random_global_type(std::mt19937_64 & rng,
                              const GeneratorOptions & opts = {});

}  // namespace synmpst
