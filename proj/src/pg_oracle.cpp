#include "pg_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "zipf.hpp"

namespace cachenet {

namespace {

// Euclidean projection onto {0 <= x_i <= cap, sum x <= budget}: clamp, and
// if the budget still overflows, shift by the water level tau solving
// sum clamp(v - tau, 0, cap) = budget.
void project_capped_budget(std::vector<double>& v, double cap, double budget) {
    double clamped_sum = 0.0, vmax = 0.0;
    for (double x : v) {
        clamped_sum += std::clamp(x, 0.0, cap);
        vmax = std::max(vmax, x);
    }
    if (clamped_sum <= budget) {
        for (double& x : v) x = std::clamp(x, 0.0, cap);
        return;
    }
    double lo = 0.0, hi = vmax;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double s = 0.0;
        for (double x : v) s += std::clamp(x - mid, 0.0, cap);
        if (s > budget)
            lo = mid;
        else
            hi = mid;
    }
    for (double& x : v) x = std::clamp(x - hi, 0.0, cap);
}

struct Feasible {
    double cap_a, cap_b, budget_a, budget_b;

    // Product projection onto the two capped budget sets.
    void project_budgets(std::vector<double>& a, std::vector<double>& b) const {
        project_capped_budget(a, cap_a, budget_a);
        project_capped_budget(b, cap_b, budget_b);
    }

    // Projection onto the per-rank halfspaces a_m + b_m >= 1.
    static void project_floor(std::vector<double>& a, std::vector<double>& b) {
        for (size_t m = 0; m < a.size(); ++m) {
            const double d = 1.0 - a[m] - b[m];
            if (d > 0.0) {
                a[m] += 0.5 * d;
                b[m] += 0.5 * d;
            }
        }
    }

    // Dykstra's alternating projection onto the intersection.
    void project(std::vector<double>& a, std::vector<double>& b) const {
        const size_t M = a.size();
        std::vector<double> pa(M, 0.0), pb(M, 0.0), qa(M, 0.0), qb(M, 0.0);
        std::vector<double> ya(M), yb(M);
        for (int cycle = 0; cycle < 200; ++cycle) {
            for (size_t m = 0; m < M; ++m) {
                ya[m] = a[m] + pa[m];
                yb[m] = b[m] + pb[m];
            }
            std::vector<double> za = ya, zb = yb;
            project_budgets(za, zb);
            double drift = 0.0;
            for (size_t m = 0; m < M; ++m) {
                pa[m] = ya[m] - za[m];
                pb[m] = yb[m] - zb[m];
                ya[m] = za[m] + qa[m];
                yb[m] = zb[m] + qb[m];
            }
            za = ya;
            zb = yb;
            project_floor(za, zb);
            for (size_t m = 0; m < M; ++m) {
                qa[m] = ya[m] - za[m];
                qb[m] = yb[m] - zb[m];
                drift = std::max(drift, std::abs(za[m] - a[m]));
                drift = std::max(drift, std::abs(zb[m] - b[m]));
                a[m] = za[m];
                b[m] = zb[m];
            }
            if (drift <= 1e-13 * (1.0 + cap_a + cap_b)) break;
        }
    }
};

} // namespace

Solution solve_projected_gradient(const Params& p, int64_t max_iters,
                                  double tol) {
    p.validate();
    if (tol <= 0.0) tol = kDefaultTol;
    if (max_iters <= 0) max_iters = 100000;
    const auto M = static_cast<size_t>(p.catalog);
    const double n = static_cast<double>(p.nodes);
    const double f = static_cast<double>(p.sbs_count);
    const Feasible feas{n, f, p.node_budget(), p.sbs_budget()};
    if (static_cast<double>(p.catalog) > feas.budget_a + feas.budget_b)
        fail(Status::infeasible,
             "cache budgets cannot host one replica of every content");

    const std::vector<double> pm = zipf_pmf_all(p.alpha, p.catalog);
    double pmax = 0.0;
    for (double v : pm) pmax = std::max(pmax, v);

    auto value = [&](const std::vector<double>& a,
                     const std::vector<double>& b) {
        double s = 0.0;
        for (size_t m = M; m-- > 0;) s += pm[m] / std::sqrt(a[m] + b[m]);
        return s;
    };
    auto gradient = [&](const std::vector<double>& a,
                        const std::vector<double>& b, std::vector<double>& g) {
        // d/dA = d/dB = -p/2 (A+B)^{-3/2}; one shared value per rank.
        for (size_t m = 0; m < M; ++m) {
            const double t = a[m] + b[m];
            g[m] = -0.5 * pm[m] / (t * std::sqrt(t));
        }
    };

    std::vector<double> xa(M), xb(M);
    const double md = static_cast<double>(p.catalog);
    for (size_t m = 0; m < M; ++m) {
        xa[m] = std::min(n, std::max(0.5, feas.budget_a / md));
        xb[m] = std::min(f, std::max(0.5, feas.budget_b / md));
    }
    feas.project(xa, xb);

    std::vector<double> prev_a = xa, prev_b = xb;
    std::vector<double> ya = xa, yb = xb, grad(M), ta(M), tb(M);
    double lips = 1.5 * pmax; // Hessian bound on the t >= 1 face
    double momentum = 1.0;
    double fx = value(xa, xb);
    int flat_streak = 0;
    int64_t iters = 0;

    for (; iters < max_iters; ++iters) {
        // Extrapolation can leave the region where the objective is
        // defined; fall back to the last iterate if it does.
        bool y_ok = true;
        for (size_t m = 0; m < M; ++m)
            if (ya[m] + yb[m] < 1e-6) {
                y_ok = false;
                break;
            }
        if (!y_ok) {
            ya = xa;
            yb = xb;
            momentum = 1.0;
        }
        const double fy = value(ya, yb);
        gradient(ya, yb, grad);

        double ft = 0.0;
        for (;;) {
            const double step = 1.0 / lips;
            for (size_t m = 0; m < M; ++m) {
                ta[m] = ya[m] - step * grad[m];
                tb[m] = yb[m] - step * grad[m];
            }
            feas.project(ta, tb);
            ft = value(ta, tb);
            double quad = fy, sq = 0.0;
            for (size_t m = 0; m < M; ++m) {
                const double da = ta[m] - ya[m], db = tb[m] - yb[m];
                quad += grad[m] * (da + db);
                sq += da * da + db * db;
            }
            quad += 0.5 * lips * sq;
            if (ft <= quad + 1e-15 * (1.0 + std::abs(quad))) break;
            lips *= 2.0;
            if (!std::isfinite(lips)) fail(Status::no_converge,
                                           "projected gradient line search diverged");
        }

        const double f_new = ft;
        if (f_new > fx) {
            // Function restart: drop momentum, retake the step from x.
            momentum = 1.0;
            ya = xa;
            yb = xb;
            if (++flat_streak > 50) break;
            continue;
        }
        const double change = fx - f_new;
        prev_a.swap(xa);
        prev_b.swap(xb);
        xa = ta;
        xb = tb;
        fx = f_new;

        const double next_momentum =
            0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double mix = (momentum - 1.0) / next_momentum;
        momentum = next_momentum;
        for (size_t m = 0; m < M; ++m) {
            ya[m] = xa[m] + mix * (xa[m] - prev_a[m]);
            yb[m] = xb[m] + mix * (xb[m] - prev_b[m]);
        }

        if (change <= 1e-12 * (1.0 + std::abs(fx))) {
            if (++flat_streak >= 30) break;
        } else {
            flat_streak = 0;
        }
    }

    Solution sol;
    sol.a = xa;
    sol.b = xb;
    sol.objective = fx;
    sol.iterations = iters;
    sol.converged = iters < max_iters;
    sol.cert.w.assign(M, 0.0);
    sol.cert.nu.assign(M, 0.0);
    return sol;
}

} // namespace cachenet
