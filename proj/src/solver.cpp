#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "zipf.hpp"

namespace cachenet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBisectCap = 200;

// For unit price g, the unconstrained minimizer of p/sqrt(t) + g*t is
// t = (p/(2g))^{2/3} = coef(g) * p^{2/3}.
double price_coef(double g) {
    if (!(g > 0.0)) return kInf;
    return 1.0 / std::cbrt(4.0 * g * g);
}

double objective_term_sum(const std::vector<double>& pm,
                          const std::vector<double>& t) {
    // Descending-index accumulation: tail terms are the small ones.
    double s = 0.0;
    for (size_t m = pm.size(); m-- > 0;) s += pm[m] / std::sqrt(t[m]);
    return s;
}

struct LadderSums {
    double tot = 0.0;   // sum t
    double ex_a = 0.0;  // sum (t - f)+
    double ex_b = 0.0;  // sum (t - n)+
};

// Joint-problem water-filling core. q holds p_m^{2/3}.
class JointLadder {
public:
    JointLadder(std::vector<double> q, double n, double f)
        : q_(std::move(q)),
          n_(n),
          f_(f),
          lo_(std::min(f, n)),
          hi_(std::max(f, n)),
          cap_(n + f) {}

    // Per-item optimum under cumulative tier prices g1 <= g2 <= g3 on
    // (0, lo], (lo, hi], (hi, cap]: since the price ladder is
    // nondecreasing and the marginal value decreasing, the optimum is the
    // nested clamp below, then clipped to the floor t >= 1.
    double item(double q, double c1, double c2, double c3) const {
        double t = std::min(c3 * q, cap_);
        t = std::min(c2 * q, std::max(hi_, t));
        t = std::min(c1 * q, std::max(lo_, t));
        return std::max(1.0, t);
    }

    LadderSums sums(double g1, double g2, double g3) const {
        const double c1 = price_coef(g1), c2 = price_coef(g2),
                     c3 = price_coef(g3);
        LadderSums s;
        for (double q : q_) {
            const double t = item(q, c1, c2, c3);
            s.tot += t;
            s.ex_a += std::max(t - f_, 0.0);
            s.ex_b += std::max(t - n_, 0.0);
        }
        return s;
    }

    void fill(double g1, double g2, double g3, std::vector<double>& t) const {
        const double c1 = price_coef(g1), c2 = price_coef(g2),
                     c3 = price_coef(g3);
        t.resize(q_.size());
        for (size_t m = 0; m < q_.size(); ++m)
            t[m] = item(q_[m], c1, c2, c3);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    std::vector<double> q_;
    double n_, f_, lo_, hi_, cap_;
};

// Smallest x in [0, x_max] with metric(x) <= target, assuming metric is
// nonincreasing and metric(x_max) <= target; returns the feasible upper
// bisection endpoint. Counts evaluations into *evals.
template <typename Metric>
double bisect_price(double x_max, double target, Metric metric,
                    int64_t* evals) {
    ++*evals;
    if (metric(0.0) <= target) return 0.0;
    double lo = 0.0, hi = x_max;
    for (int it = 0; it < kBisectCap; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        ++*evals;
        if (metric(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::vector<double> pow23(const std::vector<double>& pm) {
    std::vector<double> q(pm.size());
    for (size_t m = 0; m < pm.size(); ++m) q[m] = std::cbrt(pm[m] * pm[m]);
    return q;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

// Distribute t into (a, b). B_m is raised from its forced minimum
// (t_m - n)+ toward its ceiling min(t_m, f) by a common factor s, chosen
// so that sum B meets min(C_B, sum min(t_m, f)). When the node budget is
// tight this degenerates to s = 1, i.e. A_m = (t_m - f)+ exactly; when
// prices tie it spreads the slack proportionally, which keeps both
// budgets inside their caps (any split of the optimal totals with these
// sums is optimal, since the objective depends on t only).
void split_totals(const std::vector<double>& t, double n, double f,
                  double budget_b, std::vector<double>& a,
                  std::vector<double>& b) {
    const size_t M = t.size();
    a.resize(M);
    b.resize(M);
    double ceil_sum = 0.0;
    for (size_t m = 0; m < M; ++m) ceil_sum += std::min(t[m], f);
    const double target = std::min(budget_b, ceil_sum);

    auto sum_b = [&](double s) {
        double v = 0.0;
        for (size_t m = 0; m < M; ++m)
            v += std::max(t[m] - n, s * std::min(t[m], f));
        return v;
    };

    double s_lo = 0.0, s_hi = 1.0;
    if (sum_b(1.0) <= target) {
        s_lo = 1.0;
    } else {
        for (int it = 0; it < kBisectCap; ++it) {
            const double mid = 0.5 * (s_lo + s_hi);
            if (mid == s_lo || mid == s_hi) break;
            if (sum_b(mid) <= target)
                s_lo = mid;
            else
                s_hi = mid;
        }
    }
    for (size_t m = 0; m < M; ++m) {
        b[m] = std::max(t[m] - n, s_lo * std::min(t[m], f));
        a[m] = std::max(t[m] - b[m], 0.0);
    }
}

void check_tol(double& tol) {
    if (tol <= 0.0) tol = kDefaultTol;
    if (!std::isfinite(tol)) fail(Status::invalid, "tol must be finite");
}

std::vector<double> gather(const std::vector<double>& pm,
                           const std::vector<int64_t>& ranks, int64_t M) {
    std::vector<char> seen(static_cast<size_t>(M), 0);
    std::vector<double> out;
    out.reserve(ranks.size());
    for (int64_t r : ranks) {
        if (r < 1 || r > M) fail(Status::invalid, "rank out of range");
        if (seen[static_cast<size_t>(r - 1)])
            fail(Status::invalid, "duplicate rank in index set");
        seen[static_cast<size_t>(r - 1)] = 1;
        out.push_back(pm[static_cast<size_t>(r - 1)]);
    }
    return out;
}

} // namespace

Solution solve_joint(const Params& p, double tol) {
    p.validate();
    check_tol(tol);
    const auto M = static_cast<size_t>(p.catalog);
    const double n = static_cast<double>(p.nodes);
    const double f = static_cast<double>(p.sbs_count);
    const double ca = p.node_budget();
    const double cb = p.sbs_budget();

    const double md = static_cast<double>(p.catalog);
    if (md > ca + cb || md * std::max(1.0 - f, 0.0) > ca ||
        md * std::max(1.0 - n, 0.0) > cb)
        fail(Status::infeasible,
             "cache budgets cannot host one replica of every content");

    const std::vector<double> pm = zipf_pmf_all(p.alpha, p.catalog);
    JointLadder ladder(pow23(pm), n, f);
    const double price_max = 0.5 * max_of(pm); // all items at the floor

    Solution sol;
    // Surcharge above f prices the node budget, surcharge above n the SBS
    // budget; the one at the larger threshold sits on the outermost loop.
    const bool f_is_lo = f <= n;
    double sur_lo = 0.0, sur_hi = 0.0, theta = 0.0;

    auto inner_theta = [&](double s_lo, double s_hi) {
        return bisect_price(
            price_max, ca + cb,
            [&](double th) {
                return ladder.sums(th, th + s_lo, th + s_lo + s_hi).tot;
            },
            &sol.iterations);
    };
    auto excess_at = [&](double s_lo, double s_hi) {
        const double th = inner_theta(s_lo, s_hi);
        ++sol.iterations;
        return ladder.sums(th, th + s_lo, th + s_lo + s_hi);
    };

    const double target_lo = f_is_lo ? ca : cb; // budget paired with lo
    const double target_hi = f_is_lo ? cb : ca;
    sur_hi = bisect_price(
        price_max, target_hi,
        [&](double sh) {
            // At fixed sh, settle the inner two multipliers, then read the
            // excess above the larger threshold.
            const double sl = bisect_price(
                price_max, target_lo,
                [&](double s) {
                    const LadderSums e = excess_at(s, sh);
                    return f_is_lo ? e.ex_a : e.ex_b;
                },
                &sol.iterations);
            const LadderSums e = excess_at(sl, sh);
            return f_is_lo ? e.ex_b : e.ex_a;
        },
        &sol.iterations);
    sur_lo = bisect_price(
        price_max, target_lo,
        [&](double s) {
            const LadderSums e = excess_at(s, sur_hi);
            return f_is_lo ? e.ex_a : e.ex_b;
        },
        &sol.iterations);
    theta = inner_theta(sur_lo, sur_hi);

    std::vector<double> t;
    ladder.fill(theta, theta + sur_lo, theta + sur_lo + sur_hi, t);
    split_totals(t, n, f, cb, sol.a, sol.b);

    const double sur_a = f_is_lo ? sur_lo : sur_hi;
    const double sur_b = f_is_lo ? sur_hi : sur_lo;
    sol.cert.lambda_node = theta + sur_a;
    sol.cert.mu_sbs = theta + sur_b;
    sol.cert.w.assign(M, 0.0);
    sol.cert.nu.assign(M, 0.0);
    const double act_a = 1e-9 * (1.0 + n), act_b = 1e-9 * (1.0 + f);
    for (size_t m = 0; m < M; ++m) {
        const double g = 0.5 * pm[m] / (t[m] * std::sqrt(t[m]));
        if (sol.a[m] >= n - act_a)
            sol.cert.w[m] = std::max(0.0, g - sol.cert.lambda_node);
        if (sol.b[m] >= f - act_b)
            sol.cert.nu[m] = std::max(0.0, g - sol.cert.mu_sbs);
    }
    sol.objective = objective_term_sum(pm, t);
    sol.cert.kkt_residual = kkt_residual_joint(
        pm, sol.a, sol.b, n, f, ca, cb, sol.cert.lambda_node, sol.cert.mu_sbs);
    sol.converged = sol.cert.kkt_residual <= tol;
    return sol;
}

SingleResult solve_single(const std::vector<double>& pm, double budget,
                          double lb, double ub) {
    if (lb < 0.0 || ub < lb) fail(Status::invalid, "bad variable box");
    const double need = lb * static_cast<double>(pm.size());
    if (need > budget)
        fail(Status::infeasible, "budget below the per-content lower bounds");

    SingleResult res;
    const double pmax = max_of(pm);
    if (budget <= need * (1.0 + 1e-12) || !(budget > 0.0)) {
        // The lower bounds exhaust the budget: everything is forced.
        if (!(lb > 0.0))
            fail(Status::infeasible, "zero budget with contents to place");
        res.x.assign(pm.size(), lb);
        res.price = 0.5 * pmax / (lb * std::sqrt(lb));
        return res;
    }

    const std::vector<double> q = pow23(pm);
    double sum_q = 0.0;
    for (double qm : q) sum_q += qm;
    // sum clamp(c(th)*q, lb, ub) <= need + c(th)*sum_q, so this endpoint
    // always lands at or below the budget.
    const double price_max =
        std::max(0.5 * pmax, 0.5 * std::pow(sum_q / (budget - need), 1.5));

    auto total = [&](double th) {
        const double c = price_coef(th);
        double s = 0.0;
        for (double qm : q) s += std::clamp(c * qm, lb, ub);
        return s;
    };
    res.price = bisect_price(price_max, budget, total, &res.iterations);
    const double c = price_coef(res.price);
    res.x.resize(pm.size());
    for (size_t i = 0; i < pm.size(); ++i)
        res.x[i] = std::clamp(c * q[i], lb, ub);
    return res;
}

Solution solve_decoupled(const Params& p, const std::vector<int64_t>& set_nodes,
                         const std::vector<int64_t>& set_sbs, double tol) {
    p.validate();
    check_tol(tol);
    const auto M = static_cast<size_t>(p.catalog);
    const std::vector<double> pm = zipf_pmf_all(p.alpha, p.catalog);
    const std::vector<double> pa = gather(pm, set_nodes, p.catalog);
    const std::vector<double> pb = gather(pm, set_sbs, p.catalog);

    Solution sol;
    sol.a.assign(M, 0.0);
    sol.b.assign(M, 0.0);
    sol.cert.w.assign(M, 0.0);
    sol.cert.nu.assign(M, 0.0);
    double residual = 0.0;

    const double n = static_cast<double>(p.nodes);
    const double f = static_cast<double>(p.sbs_count);
    if (!pa.empty()) {
        SingleResult ra = solve_single(pa, p.node_budget(), 0.0, n);
        sol.iterations += ra.iterations;
        sol.cert.lambda_node = ra.price;
        for (size_t i = 0; i < pa.size(); ++i) {
            const size_t m = static_cast<size_t>(set_nodes[i] - 1);
            sol.a[m] = ra.x[i];
            const double g = 0.5 * pa[i] / (ra.x[i] * std::sqrt(ra.x[i]));
            if (ra.x[i] >= n - 1e-9 * (1.0 + n))
                sol.cert.w[m] = std::max(0.0, g - ra.price);
            sol.objective += pa[i] / std::sqrt(ra.x[i]);
        }
        residual = std::max(residual, kkt_residual_single(pa, ra.x, 0.0, n,
                                                          p.node_budget(),
                                                          ra.price));
    }
    if (!pb.empty()) {
        SingleResult rb = solve_single(pb, p.sbs_budget(), 0.0, f);
        sol.iterations += rb.iterations;
        sol.cert.mu_sbs = rb.price;
        for (size_t i = 0; i < pb.size(); ++i) {
            const size_t m = static_cast<size_t>(set_sbs[i] - 1);
            sol.b[m] = rb.x[i];
            const double g = 0.5 * pb[i] / (rb.x[i] * std::sqrt(rb.x[i]));
            if (rb.x[i] >= f - 1e-9 * (1.0 + f))
                sol.cert.nu[m] = std::max(0.0, g - rb.price);
            sol.objective += pb[i] / std::sqrt(rb.x[i]);
        }
        residual = std::max(residual, kkt_residual_single(pb, rb.x, 0.0, f,
                                                          p.sbs_budget(),
                                                          rb.price));
    }
    sol.cert.kkt_residual = residual;
    sol.converged = residual <= tol;
    return sol;
}

Solution solve_baseline(const Params& p, Baseline which, double tol) {
    p.validate();
    check_tol(tol);
    const auto M = static_cast<size_t>(p.catalog);
    const std::vector<double> pm = zipf_pmf_all(p.alpha, p.catalog);

    const bool nodes = which == Baseline::nodes_only;
    const double ub = static_cast<double>(nodes ? p.nodes : p.sbs_count);
    const double budget = nodes ? p.node_budget() : p.sbs_budget();
    SingleResult r = solve_single(pm, budget, 1.0, ub);

    Solution sol;
    sol.iterations = r.iterations;
    sol.a.assign(M, 0.0);
    sol.b.assign(M, 0.0);
    sol.cert.w.assign(M, 0.0);
    sol.cert.nu.assign(M, 0.0);
    (nodes ? sol.a : sol.b) = r.x;
    (nodes ? sol.cert.lambda_node : sol.cert.mu_sbs) = r.price;
    std::vector<double>& capmul = nodes ? sol.cert.w : sol.cert.nu;
    for (size_t m = 0; m < M; ++m) {
        const double g = 0.5 * pm[m] / (r.x[m] * std::sqrt(r.x[m]));
        if (r.x[m] >= ub - 1e-9 * (1.0 + ub))
            capmul[m] = std::max(0.0, g - r.price);
    }
    sol.objective = objective_term_sum(pm, r.x);
    sol.cert.kkt_residual =
        kkt_residual_single(pm, r.x, 1.0, ub, budget, r.price);
    sol.converged = sol.cert.kkt_residual <= tol;
    return sol;
}

double objective_of(const std::vector<double>& pm, const std::vector<double>& a,
                    const std::vector<double>& b, int64_t* below_floor) {
    if (pm.size() != a.size() || pm.size() != b.size())
        fail(Status::invalid, "allocation length mismatch");
    if (below_floor) *below_floor = 0;
    double s = 0.0;
    for (size_t m = pm.size(); m-- > 0;) {
        const double t = a[m] + b[m];
        if (!(t > 0.0)) fail(Status::zero_total, "A_m + B_m = 0");
        if (below_floor && t < 1.0) ++*below_floor;
        s += pm[m] / std::sqrt(t);
    }
    return s;
}

double kkt_residual_joint(const std::vector<double>& pm,
                          const std::vector<double>& a,
                          const std::vector<double>& b, double node_cap,
                          double sbs_cap, double budget_a, double budget_b,
                          double lambda, double mu) {
    const double act_a = 1e-7 * (1.0 + node_cap);
    const double act_b = 1e-7 * (1.0 + sbs_cap);
    double r = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (size_t m = pm.size(); m-- > 0;) {
        sum_a += a[m];
        sum_b += b[m];
        const double t = a[m] + b[m];
        r = std::max(r, (1.0 - t) / 2.0); // floor feasibility
        r = std::max(r, (a[m] - node_cap) / (1.0 + node_cap));
        r = std::max(r, (b[m] - sbs_cap) / (1.0 + sbs_cap));
        r = std::max(r, -a[m] / (1.0 + node_cap));
        r = std::max(r, -b[m] / (1.0 + sbs_cap));
        if (!(t > 0.0)) return kInf;
        const double g = 0.5 * pm[m] / (t * std::sqrt(t));
        const double scale = lambda + mu + g;
        if (t > 1.0 + 1e-7) {
            // Floor inactive: plain box conditions on each variable. A
            // variable whose box has zero width is fixed outright and
            // imposes no stationarity condition.
            if (node_cap > 2.0 * act_a) {
                if (a[m] < act_a)
                    r = std::max(r, std::max(0.0, g - lambda) / scale);
                else if (a[m] > node_cap - act_a)
                    r = std::max(r, std::max(0.0, lambda - g) / scale);
                else
                    r = std::max(r, std::abs(g - lambda) / scale);
            }
            if (sbs_cap > 2.0 * act_b) {
                if (b[m] < act_b)
                    r = std::max(r, std::max(0.0, g - mu) / scale);
                else if (b[m] > sbs_cap - act_b)
                    r = std::max(r, std::max(0.0, mu - g) / scale);
                else
                    r = std::max(r, std::abs(g - mu) / scale);
            }
        } else {
            // Floor active: growing t must not pay off at the cheapest
            // available price, and shifting mass between A and B at fixed
            // t must not pay off either.
            double price = kInf;
            if (a[m] < node_cap - act_a) price = std::min(price, lambda);
            if (b[m] < sbs_cap - act_b) price = std::min(price, mu);
            if (price < kInf)
                r = std::max(r, std::max(0.0, g - price) / scale);
            if (a[m] > act_a && b[m] < sbs_cap - act_b)
                r = std::max(r, std::max(0.0, lambda - mu) / scale);
            if (b[m] > act_b && a[m] < node_cap - act_a)
                r = std::max(r, std::max(0.0, mu - lambda) / scale);
        }
    }
    // Budget feasibility and complementary slackness (either the
    // multiplier or the slack must vanish).
    r = std::max(r, (sum_a - budget_a) / (1.0 + budget_a));
    r = std::max(r, (sum_b - budget_b) / (1.0 + budget_b));
    r = std::max(r, std::min(lambda / (1.0 + lambda),
                             std::max(0.0, budget_a - sum_a) / (1.0 + budget_a)));
    r = std::max(r, std::min(mu / (1.0 + mu),
                             std::max(0.0, budget_b - sum_b) / (1.0 + budget_b)));
    return r;
}

double kkt_residual_single(const std::vector<double>& pm,
                           const std::vector<double>& x, double lb, double ub,
                           double budget, double price) {
    const double act = 1e-7 * (1.0 + ub);
    double r = 0.0, sum = 0.0;
    for (size_t m = pm.size(); m-- > 0;) {
        sum += x[m];
        r = std::max(r, (lb - x[m]) / (1.0 + ub));
        r = std::max(r, (x[m] - ub) / (1.0 + ub));
        if (!(x[m] > 0.0)) return kInf;
        const double g = 0.5 * pm[m] / (x[m] * std::sqrt(x[m]));
        const double scale = price + g;
        if (ub - lb > 2.0 * act) {  // a zero-width box pins the variable
            if (x[m] < lb + act)
                r = std::max(r, std::max(0.0, g - price) / scale);
            else if (x[m] > ub - act)
                r = std::max(r, std::max(0.0, price - g) / scale);
            else
                r = std::max(r, std::abs(g - price) / scale);
        }
    }
    r = std::max(r, (sum - budget) / (1.0 + budget));
    r = std::max(r, std::min(price / (1.0 + price),
                             std::max(0.0, budget - sum) / (1.0 + budget)));
    return r;
}

} // namespace cachenet
