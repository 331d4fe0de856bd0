// Reference solver for the joint placement problem: accelerated projected
// gradient descent with a Dykstra projection onto the feasible set. Much
// slower than the water-filling solver and independent of it; used for
// cross-checks and certificates, not production solves.
#pragma once

#include <cstdint>

#include "params.hpp"
#include "solver.hpp"

namespace cachenet {

// max_iters <= 0 selects the default (100000). The certificate in the
// result carries no multipliers (a primal-only method); `objective` and
// the allocation are the meaningful outputs.
Solution solve_projected_gradient(const Params& p, int64_t max_iters,
                                  double tol);

} // namespace cachenet
