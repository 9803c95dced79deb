// SPDX-License-Identifier: Apache-2.0
//
// Rostering-specific solver entry points: greedy incumbent, exhaustive
// enumeration oracle, and the encode -> solve -> decode pipeline.

#pragma once

#include <optional>
#include <stdexcept>

#include "nrp/encoder.hpp"
#include "nrp/milp.hpp"
#include "nrp/model.hpp"

namespace nrp {

// Greedy feasible roster. nullopt when the weekly minimum top-up or a
// min_staff floor cannot be met greedily.
std::optional<Roster> warm_start(const RosterInstance& instance);

inline constexpr int kBruteForceMaxCells = 16;

class EnumerationTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Exhaustive search over every assignment matrix. Requires
// nurses * shifts * days <= kBruteForceMaxCells. nullopt when no assignment
// satisfies the per-nurse rules (one shift per day, weekly hour bounds,
// night rest) and the min_staff floors.
std::optional<Roster> brute_force_solve(const RosterInstance& instance);

struct RosterSolution {
  MilpResult milp;
  std::optional<Roster> roster;  // set whenever milp has a solution
};

// encode, seed with warm_start, branch-and-bound, decode.
RosterSolution solve_instance(const RosterInstance& instance, const SolveOptions& options = {});

}  // namespace nrp
