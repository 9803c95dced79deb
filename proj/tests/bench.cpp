// SPDX-License-Identifier: Apache-2.0
//
// Non-gating scale benchmark: nrp_bench [nurses weeks [time_limit_s]]
// Without arguments runs the 10x4 and 40x8 points.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "nrp/roster_solver.hpp"
#include "test_instances.hpp"

namespace {

void run(int nurses, int weeks, double limit) {
  const nrp::RosterInstance inst = nrp::testing::scale_instance(nurses, weeks);
  const nrp::EncodedModel enc = nrp::encode(inst);
  nrp::SolveOptions opts;
  opts.time_limit_seconds = limit;
  const nrp::RosterSolution sol = nrp::solve_instance(inst, opts);
  std::printf("n=%d q=%d rows=%d cols=%d status=%s objective=%.6f bound=%.6f gap=%.3g nodes=%ld "
              "iterations=%ld time_s=%.2f\n",
              nurses, weeks, enc.model.num_rows(), enc.model.num_columns(),
              nrp::to_string(sol.milp.status), sol.milp.objective, sol.milp.best_bound, sol.milp.gap,
              sol.milp.stats.nodes, sol.milp.stats.simplex_iterations, sol.milp.stats.wall_seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 3) {
    run(std::atoi(argv[1]), std::atoi(argv[2]), argc >= 4 ? std::atof(argv[3]) : 300.0);
    return 0;
  }
  run(10, 4, 300.0);
  run(40, 8, 300.0);
  return 0;
}
