// Replica-placement solvers.
//
// Joint problem:  minimize sum_m p_m / sqrt(A_m + B_m)
//                 s.t. sum A <= C_A, sum B <= C_B,
//                      0 <= A_m <= n, 0 <= B_m <= f, A_m + B_m >= 1.
//
// The joint solve works on the totals t_m = A_m + B_m: t is achievable by
// some feasible (A, B) iff
//     1 <= t_m <= n + f,
//     sum (t_m - f)+ <= C_A,   sum (t_m - n)+ <= C_B,
//     sum t_m <= C_A + C_B
// (the excess above f must come from nodes, the excess above n from SBSs;
// sufficiency is a max-flow argument on the bipartite assignment). The
// objective is separable and convex in t, so the reduced problem is a
// water-filling with a three-step unit-price ladder: theta on every unit,
// plus a surcharge above f (priced against C_A) and a surcharge above n
// (priced against C_B). Each multiplier is found by bisection, nested
// innermost-to-outermost as theta, the surcharge at min(f,n), and the
// surcharge at max(f,n). A final one-dimensional split rule distributes
// each t_m between A_m and B_m so that both budgets and boxes hold and
// complementary slackness is preserved.
#pragma once

#include <cstdint>
#include <vector>

#include "params.hpp"

namespace cachenet {

struct DualCertificate {
    double lambda_node = 0.0;   // price on sum A <= n * node_cache
    double mu_sbs = 0.0;        // price on sum B <= f * sbs_cache
    std::vector<double> w;      // per-rank multipliers of A_m <= n
    std::vector<double> nu;     // per-rank multipliers of B_m <= f
    double kkt_residual = 0.0;  // scaled sup-norm residual, see kkt_residual_joint
};

struct Solution {
    std::vector<double> a;
    std::vector<double> b;
    double objective = 0.0;
    DualCertificate cert;
    bool converged = true;
    int64_t iterations = 0;  // price-ladder evaluations spent
};

inline constexpr double kDefaultTol = 1e-8;

Solution solve_joint(const Params& p, double tol);

// Node-side subproblem on `set_nodes` (A variables, box [0, n], budget
// C_A) plus SBS-side subproblem on `set_sbs` (B, box [0, f], budget C_B),
// solved independently. Ranks are 1-based. `objective` is the sum of the
// two subproblem objectives.
Solution solve_decoupled(const Params& p, const std::vector<int64_t>& set_nodes,
                         const std::vector<int64_t>& set_sbs, double tol);

enum class Baseline { nodes_only, sbs_only };

// Single-resource problem over the whole catalog with box [1, n] (nodes)
// or [1, f] (SBSs) and the corresponding budget.
Solution solve_baseline(const Params& p, Baseline which, double tol);

// Water-filling for one resource: minimize sum p_i/sqrt(x_i) subject to
// sum x <= budget, lb <= x_i <= ub. `price` is the budget multiplier.
struct SingleResult {
    std::vector<double> x;
    double price = 0.0;
    int64_t iterations = 0;
};
SingleResult solve_single(const std::vector<double>& pm, double budget,
                          double lb, double ub);

// sum p_m / sqrt(a_m + b_m); counts entries with a+b < 1 into
// *below_floor when given; throws Status::zero_total on a+b <= 0.
double objective_of(const std::vector<double>& pm, const std::vector<double>& a,
                    const std::vector<double>& b,
                    int64_t* below_floor = nullptr);

// Independent certificate checker: recomputes the scaled KKT residual of
// (a, b, lambda, mu) for the joint problem from scratch. Stationarity
// terms are compared one-sidedly at active bounds and scaled by
// (lambda + mu + gradient); budget terms are scaled by (1 + budget).
double kkt_residual_joint(const std::vector<double>& pm,
                          const std::vector<double>& a,
                          const std::vector<double>& b, double node_cap,
                          double sbs_cap, double budget_a, double budget_b,
                          double lambda, double mu);

// Same idea for a single-resource solution with box [lb, ub].
double kkt_residual_single(const std::vector<double>& pm,
                           const std::vector<double>& x, double lb, double ub,
                           double budget, double price);

} // namespace cachenet
