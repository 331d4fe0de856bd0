#include "scaling.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace cachenet {

namespace {

struct Exps {
    double alpha, gamma, beta, delta;
};

Exps need_exponents(const Params& p) {
    p.validate();
    if (!p.has_exponents())
        fail(Status::missing_exponents,
             "scaling exponents gamma, beta, delta are required");
    return {p.alpha, *p.gamma, *p.beta, *p.delta};
}

void need_light_tail(const Exps& e) {
    if (e.alpha >= 1.5)
        fail(Status::not_applicable,
             "asymptotic allocation laws hold only for alpha < 3/2");
}

double case_boundary(const Exps& e) {
    return 3.0 * (e.gamma - e.beta) / (2.0 * (e.delta + e.gamma - 1.0));
}

double tail_exponent(const Exps& e) {
    return e.beta + e.delta - e.gamma * (1.0 - 2.0 * e.alpha / 3.0);
}

double head_exponent(const Exps& e) {
    return e.delta + (1.0 - e.delta) * 2.0 * e.alpha / 3.0;
}

double m2_exponent(const Exps& e) {
    return e.gamma - (e.gamma - e.beta) * 3.0 / (2.0 * e.alpha);
}

} // namespace

RegimeReport classify_regime(const Params& p) {
    const Exps e = need_exponents(p);
    RegimeReport r;
    r.case_boundary = case_boundary(e);
    r.regime_boundary =
        1.0 + (e.gamma - e.beta) / (2.0 * (e.gamma + e.delta - 1.0));
    r.m1_exponent = 1.0 - e.delta;
    r.m2_exponent = m2_exponent(e);
    r.m4_exponent =
        e.gamma - (e.gamma + e.delta - 1.0) * 3.0 / (2.0 * e.alpha);
    if (e.alpha >= 1.5) {
        r.regime = Regime::heavy;
        r.b = 0.0;
    } else if (e.alpha >= r.regime_boundary) {
        r.regime = Regime::moderate;
        r.b = (1.0 - e.delta) * (3.0 - 2.0 * e.alpha);
    } else {
        r.regime = Regime::flat;
        r.b = 1.0 - e.delta - e.beta +
              std::min(3.0 - 2.0 * e.alpha, 1.0) * e.gamma;
    }
    return r;
}

std::vector<PowerPiece> joint_asymptotics(const Params& p) {
    const Exps e = need_exponents(p);
    need_light_tail(e);
    const double me = -2.0 * e.alpha / 3.0;
    if (e.alpha <= case_boundary(e))
        return {{0.0, e.gamma, me, tail_exponent(e)}};
    const double m1e = 1.0 - e.delta;
    const double m2e = m2_exponent(e);
    return {{0.0, m1e, me, head_exponent(e)},
            {m1e, m2e, 0.0, e.delta},
            {m2e, e.gamma, me, tail_exponent(e)}};
}

void split_asymptotics(const Params& p, std::vector<PowerPiece>& node_side,
                       std::vector<PowerPiece>& sbs_side) {
    const Exps e = need_exponents(p);
    need_light_tail(e);
    const double me = -2.0 * e.alpha / 3.0;
    const double m2e = m2_exponent(e);
    // Node replicas cover the head only: up to m2 in the single-law case,
    // up to m1 when the plateau exists.
    const bool single_law = e.alpha <= case_boundary(e);
    const double prefix = single_law ? m2e : 1.0 - e.delta;
    node_side.clear();
    if (prefix > 0.0)
        node_side.push_back(
            {0.0, prefix, me,
             std::min(tail_exponent(e), head_exponent(e))});
    sbs_side.clear();
    if (m2e > 0.0) sbs_side.push_back({0.0, m2e, 0.0, e.delta});
    sbs_side.push_back({std::max(m2e, 0.0), e.gamma, me, tail_exponent(e)});
}

std::vector<PowerPiece> baseline_asymptotics(const Params& p) {
    const Exps e = need_exponents(p);
    need_light_tail(e);
    const double me = -2.0 * e.alpha / 3.0;
    const double m2e = m2_exponent(e);
    const double m4e =
        e.gamma - (e.gamma + e.delta - 1.0) * 3.0 / (2.0 * e.alpha);
    std::vector<PowerPiece> out;
    if (m4e > 0.0)
        out.push_back(
            {0.0, m4e, me, 1.0 - e.gamma * (1.0 - 2.0 * e.alpha / 3.0)});
    if (m2e > std::max(m4e, 0.0))
        out.push_back({std::max(m4e, 0.0), m2e, 0.0, e.delta});
    out.push_back({std::max({m2e, m4e, 0.0}), e.gamma, me, tail_exponent(e)});
    return out;
}

CompareVerdict compare_strategies(const Params& p, double* threshold) {
    const Exps e = need_exponents(p);
    need_light_tail(e);
    const double s = 3.0 * (e.gamma + e.delta - 1.0);
    const double thr = s / (s - (e.gamma - e.beta));
    if (threshold) *threshold = thr;
    return e.alpha < thr ? CompareVerdict::equal_order
                         : CompareVerdict::joint_wins;
}

void tradeoff_exponents(const Params& p, double* b, double* throughput_exp) {
    const RegimeReport r = classify_regime(p);
    if (b) *b = r.b;
    if (throughput_exp)
        *throughput_exp = r.regime == Regime::heavy ? -0.5 : -0.5 * r.b;
}

double fit_scale(const std::vector<PowerPiece>& curve, double n,
                 const std::vector<int64_t>& ranks,
                 const std::vector<double>& values) {
    if (curve.empty() || ranks.size() != values.size() || !(n > 1.0))
        fail(Status::invalid, "bad fit inputs");
    const double ln_n = std::log(n);
    double acc = 0.0;
    size_t used = 0;
    for (size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] < 1 || !(values[i] > 0.0)) continue;
        const double lm = std::log(static_cast<double>(ranks[i]));
        const PowerPiece* hit = nullptr;
        for (const PowerPiece& pc : curve) {
            const bool last = &pc == &curve.back();
            if (lm >= pc.lo_exponent * ln_n - 1e-12 &&
                (lm < pc.hi_exponent * ln_n ||
                 (last && lm <= pc.hi_exponent * ln_n + 1e-12))) {
                hit = &pc;
                break;
            }
        }
        if (!hit) continue;
        acc += std::log(values[i]) -
               (hit->m_exponent * lm + hit->n_exponent * ln_n);
        ++used;
    }
    if (used == 0)
        fail(Status::invalid, "no samples fall inside the law's rank range");
    return std::exp(acc / static_cast<double>(used));
}

} // namespace cachenet
