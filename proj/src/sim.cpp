#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "errors.hpp"
#include "zipf.hpp"

namespace cachenet {

namespace {

bool is_perfect_square(int64_t v) {
    if (v < 0) return false;
    auto r = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (int64_t c = std::max<int64_t>(0, r - 2); c <= r + 2; ++c)
        if (c * c == v) return true;
    return false;
}

} // namespace

void SimConfig::validate() const {
    if (nodes < 1) fail(Status::invalid, "sim: nodes must be >= 1");
    if (lattice_side < 0) fail(Status::invalid, "sim: lattice_side must be >= 0");
    if (!(routing_area_factor > 0.0) || !std::isfinite(routing_area_factor))
        fail(Status::invalid, "sim: routing_area_factor must be positive");
    if (!(protocol_delta >= 0.0) || !std::isfinite(protocol_delta))
        fail(Status::invalid, "sim: protocol_delta must be >= 0");
    if (activation_period != 0 &&
        (activation_period < 4 || !is_perfect_square(activation_period)))
        fail(Status::invalid, "sim: activation_period must be 0 or a perfect square >= 4");
    if (tx_range_cells != 0.0 && !(tx_range_cells >= 1.0))
        fail(Status::invalid, "sim: tx_range_cells must be 0 or >= 1");
    if (horizon < 1) fail(Status::invalid, "sim: horizon must be >= 1");
    if (trials < 1) fail(Status::invalid, "sim: trials must be >= 1");
    if (warmup < 0 || warmup >= horizon)
        fail(Status::invalid, "sim: warmup must lie in [0, horizon)");
    if (threads < 0) fail(Status::invalid, "sim: threads must be >= 0");
}

void SimConfig::set(const std::string& key, double value) {
    auto as_count = [&](const char* what) {
        if (!std::isfinite(value) || value != std::floor(value) || std::fabs(value) > 9.0e15)
            fail(Status::invalid, std::string("sim: ") + what + " must be an integer");
        return static_cast<int64_t>(value);
    };
    if (key == "nodes") nodes = as_count("nodes");
    else if (key == "lattice_side") lattice_side = as_count("lattice_side");
    else if (key == "routing_area_factor") routing_area_factor = value;
    else if (key == "protocol_delta") protocol_delta = value;
    else if (key == "activation_period") activation_period = as_count("activation_period");
    else if (key == "tx_range_cells") tx_range_cells = value;
    else if (key == "horizon") horizon = as_count("horizon");
    else if (key == "trials") trials = as_count("trials");
    else if (key == "warmup") warmup = as_count("warmup");
    else if (key == "seed") seed = static_cast<uint64_t>(as_count("seed"));
    else if (key == "threads") threads = as_count("threads");
    else if (key == "mobile") mobile = value != 0.0;
    else if (key == "torus") torus = value != 0.0;
    else if (key == "collect_load") collect_load = value != 0.0;
    else fail(Status::invalid, "sim: unknown key '" + key + "'");
}

double SimConfig::get(const std::string& key) const {
    if (key == "nodes") return static_cast<double>(nodes);
    if (key == "lattice_side") return static_cast<double>(side());
    if (key == "routing_area_factor") return routing_area_factor;
    if (key == "protocol_delta") return protocol_delta;
    if (key == "activation_period") return static_cast<double>(period());
    if (key == "tx_range_cells") return tx_range();
    if (key == "horizon") return static_cast<double>(horizon);
    if (key == "trials") return static_cast<double>(trials);
    if (key == "warmup") return static_cast<double>(warmup);
    if (key == "seed") return static_cast<double>(seed);
    if (key == "threads") return static_cast<double>(threads);
    if (key == "mobile") return mobile ? 1.0 : 0.0;
    if (key == "torus") return torus ? 1.0 : 0.0;
    if (key == "collect_load") return collect_load ? 1.0 : 0.0;
    fail(Status::invalid, "sim: unknown key '" + key + "'");
}

int64_t SimConfig::side() const {
    if (lattice_side > 0) return lattice_side;
    auto L = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(nodes))));
    return std::max<int64_t>(1, L);
}

int64_t SimConfig::routing_cells() const {
    const double n = static_cast<double>(nodes);
    const double area = routing_area_factor * std::log(std::max(2.0, n)) / n;
    auto R = static_cast<int64_t>(std::floor(1.0 / std::sqrt(area)));
    return std::max<int64_t>(1, std::min(R, side()));
}

int64_t SimConfig::pitch() const {
    const double need = (1.0 + protocol_delta) * tx_range();
    int64_t P = 3;
    while (static_cast<double>(P - 2) < need - 1e-12) ++P;
    return P;
}

int64_t SimConfig::period() const {
    if (activation_period > 0) return activation_period;
    const int64_t P = pitch();
    return P * P;
}

void rwmm_step(int64_t& x, int64_t& y, int64_t side, bool torus,
               Xoshiro256pp& rng) {
    static const int64_t dx[4] = {1, -1, 0, 0};
    static const int64_t dy[4] = {0, 0, 1, -1};
    const uint64_t d = rng.next_below(4);
    int64_t nx = x + dx[d];
    int64_t ny = y + dy[d];
    if (torus) {
        if (nx < 0) nx += side;
        if (nx >= side) nx -= side;
        if (ny < 0) ny += side;
        if (ny >= side) ny -= side;
    } else if (nx < 0 || nx >= side || ny < 0 || ny >= side) {
        return;  // reflecting boundary: blocked moves are skipped
    }
    x = nx;
    y = ny;
}

namespace {

// --------------------------------------------------------------------
// Replica rounding
// --------------------------------------------------------------------

// Largest-remainder rounding of one side against an integer budget:
// floors first, then hands the missing units to the largest fractional
// parts (ties to the more popular rank).
std::vector<int64_t> round_side(const std::vector<double>& v, int64_t cap,
                                double budget) {
    const auto M = static_cast<int64_t>(v.size());
    std::vector<int64_t> out(M, 0);
    double total = 0.0;
    for (int64_t m = 0; m < M; ++m) {
        if (!(v[m] >= -1e-9) || !std::isfinite(v[m]))
            fail(Status::invalid, "round_replicas: allocation entries must be finite and >= 0");
        const double x = std::min(std::max(v[m], 0.0), static_cast<double>(cap));
        out[m] = static_cast<int64_t>(std::floor(x + 1e-12));
        total += x;
    }
    const auto target = std::min(static_cast<int64_t>(std::floor(total + 1e-9)),
                                 static_cast<int64_t>(std::floor(budget + 1e-9)));
    int64_t have = std::accumulate(out.begin(), out.end(), int64_t{0});
    if (have >= target) return out;

    std::vector<int64_t> idx(M);
    std::iota(idx.begin(), idx.end(), int64_t{0});
    std::vector<double> rem(M);
    for (int64_t m = 0; m < M; ++m)
        rem[m] = std::min(std::max(v[m], 0.0), static_cast<double>(cap)) -
                 static_cast<double>(out[m]);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int64_t i, int64_t j) { return rem[i] > rem[j]; });
    for (int64_t k = 0; k < M && have < target; ++k) {
        const int64_t m = idx[k];
        if (out[m] >= cap) continue;
        ++out[m];
        ++have;
    }
    return out;
}

} // namespace

RoundedPlacement round_replicas(const Params& p, const std::vector<double>& a,
                                const std::vector<double>& b) {
    p.validate();
    const auto M = static_cast<size_t>(p.catalog);
    if (a.size() != M || b.size() != M)
        fail(Status::invalid, "round_replicas: allocation size must match the catalog");
    RoundedPlacement r;
    r.node_copies = round_side(a, p.nodes, p.node_budget());
    r.sbs_copies = round_side(b, p.sbs_count, p.sbs_budget());

    // Every rank must keep at least one copy: pull a unit from the least
    // popular rank that can spare one on the same side.
    for (size_t m = 0; m < M; ++m) {
        if (r.node_copies[m] + r.sbs_copies[m] > 0) continue;
        const bool prefer_sbs = b[m] >= a[m];
        bool fixed = false;
        for (int pass = 0; pass < 2 && !fixed; ++pass) {
            const bool use_sbs = (pass == 0) ? prefer_sbs : !prefer_sbs;
            auto& side_counts = use_sbs ? r.sbs_copies : r.node_copies;
            const int64_t cap = use_sbs ? p.sbs_count : p.nodes;
            if (cap < 1) continue;
            for (size_t d = M; d-- > 0;) {
                if (d == m) continue;
                if (side_counts[d] >= 1 &&
                    r.node_copies[d] + r.sbs_copies[d] >= 2) {
                    --side_counts[d];
                    ++side_counts[m];
                    fixed = true;
                    break;
                }
            }
        }
        if (!fixed)
            fail(Status::capacity,
                 "round_replicas: cannot give every rank a copy within the budgets");
    }
    return r;
}

namespace {

// --------------------------------------------------------------------
// Geometry helpers (positions are subcell indices on an L x L lattice;
// SBS k sits at the center of box cell k of a G x G grid, G = ceil(sqrt f))
// --------------------------------------------------------------------

struct Geometry {
    int64_t L = 1;   // subcell lattice side
    int64_t R = 1;   // routing grid side
    int64_t G = 1;   // SBS box grid side
    bool torus = true;

    int64_t cell_coord(int64_t sub) const {
        // routing cell of a subcell center: floor(((2*sub+1)/(2L)) * R)
        return std::min(R - 1, ((2 * sub + 1) * R) / (2 * L));
    }
    int64_t sbs_cell_coord(int64_t g) const {
        return std::min(R - 1, ((2 * g + 1) * R) / (2 * G));
    }
    // box-grid coordinate containing the center of routing cell c
    int64_t box_of_cell(int64_t c) const {
        return std::min(G - 1, ((2 * c + 1) * G) / (2 * R));
    }
    int64_t wrap_delta(int64_t from, int64_t to) const {
        int64_t d = to - from;
        if (!torus) return d;
        if (2 * d > R) d -= R;
        if (2 * d < -R) d += R;
        return d;
    }
    // squared node-node distance in subcell units
    int64_t dist2_sub(int64_t x1, int64_t y1, int64_t x2, int64_t y2) const {
        int64_t dx = std::llabs(x1 - x2);
        int64_t dy = std::llabs(y1 - y2);
        if (torus) {
            dx = std::min(dx, L - dx);
            dy = std::min(dy, L - dy);
        }
        return dx * dx + dy * dy;
    }
    double axis_gap(double d, double span) const {
        d = std::fabs(d);
        if (torus) d = std::min(d, span - d);
        return d;
    }
    // physical squared distance between a node subcell and an SBS center
    double dist2_node_sbs(int64_t x, int64_t y, int64_t gx, int64_t gy) const {
        const double nx = (2.0 * static_cast<double>(x) + 1.0) / (2.0 * static_cast<double>(L));
        const double ny = (2.0 * static_cast<double>(y) + 1.0) / (2.0 * static_cast<double>(L));
        const double sx = (2.0 * static_cast<double>(gx) + 1.0) / (2.0 * static_cast<double>(G));
        const double sy = (2.0 * static_cast<double>(gy) + 1.0) / (2.0 * static_cast<double>(G));
        const double dx = axis_gap(nx - sx, 1.0);
        const double dy = axis_gap(ny - sy, 1.0);
        return dx * dx + dy * dy;
    }
};

struct Chase {
    int64_t cx, cy;  // one 4-adjacent step toward the target cell
};

Chase step_toward(const Geometry& g, int64_t cx, int64_t cy, int64_t tx, int64_t ty) {
    const int64_t dx = g.wrap_delta(cx, tx);
    const int64_t dy = g.wrap_delta(cy, ty);
    int64_t nx = cx, ny = cy;
    if (dx == 0 && dy == 0) return {cx, cy};
    if (std::llabs(dx) >= std::llabs(dy)) {
        nx = cx + (dx > 0 ? 1 : -1);
        if (g.torus) {
            if (nx < 0) nx += g.R;
            if (nx >= g.R) nx -= g.R;
        }
    } else {
        ny = cy + (dy > 0 ? 1 : -1);
        if (g.torus) {
            if (ny < 0) ny += g.R;
            if (ny >= g.R) ny -= g.R;
        }
    }
    return {nx, ny};
}

// --------------------------------------------------------------------
// Per-trial machinery
// --------------------------------------------------------------------

struct TrialResult {
    int64_t delay_sum = 0;
    int64_t completed = 0;
    int64_t issued = 0;  // counted requests issued in the measured window
    std::vector<int64_t> hops_hist;
    std::vector<double> dist_sum;  // per rank
    std::vector<int64_t> dist_cnt;
    double max_load = 0.0;  // peak per-cell content transmissions per slot
    std::vector<TxRecord> audit;
};

struct Request {
    bool active = false;
    bool counted = false;
    bool launched = false;  // content detached from its holder
    int64_t rank = 0;
    int64_t issue = 0;
    int64_t launch = -1;  // slot the requesting message left the requester
    int64_t holder = -1;        // node id, or nodes + sbs id
    int64_t phase1_done = -1;   // slot the message reached the holder
    int64_t msg_cx = 0, msg_cy = 0;
    int64_t cont_cx = 0, cont_cy = 0;
    int64_t hops_msg = 0, hops_cont = 0;
};

class TrialRunner {
public:
    TrialRunner(const SimConfig& cfg, const Params& p,
                const RoundedPlacement& placement,
                const std::vector<double>& zipf_cum, bool want_audit)
        : cfg_(cfg), p_(p), placement_(placement), zipf_cum_(zipf_cum),
          want_audit_(want_audit) {
        geo_.L = cfg.side();
        geo_.R = cfg.routing_cells();
        geo_.torus = cfg.torus;
        int64_t G = 1;
        while (G * G < p.sbs_count) ++G;
        geo_.G = std::max<int64_t>(1, G);
        period_ = cfg.period();
        pitch_ = 1;
        while (pitch_ * pitch_ < period_) ++pitch_;
    }

    TrialResult run(int64_t trial) {
        Xoshiro256pp rng(cfg_.seed, static_cast<uint64_t>(trial));
        const int64_t n = cfg_.nodes;
        const auto M = static_cast<int64_t>(placement_.node_copies.size());

        TrialResult res;
        res.dist_sum.assign(static_cast<size_t>(M), 0.0);
        res.dist_cnt.assign(static_cast<size_t>(M), 0);
        res.hops_hist.assign(8, 0);

        xs_.assign(static_cast<size_t>(n), 0);
        ys_.assign(static_cast<size_t>(n), 0);
        for (int64_t i = 0; i < n; ++i) {
            xs_[static_cast<size_t>(i)] = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(geo_.L)));
            ys_[static_cast<size_t>(i)] = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(geo_.L)));
        }
        place_copies(rng);

        reqs_.assign(static_cast<size_t>(n), Request{});
        next_issue_.assign(static_cast<size_t>(n), 0);
        load_.assign(static_cast<size_t>(geo_.R * geo_.R), 0);

        const int64_t horizon = cfg_.horizon;
        for (int64_t s = 0; s < horizon; ++s) {
            if (cfg_.mobile && s > 0)
                for (int64_t i = 0; i < n; ++i)
                    rwmm_step(xs_[static_cast<size_t>(i)], ys_[static_cast<size_t>(i)],
                              geo_.L, cfg_.torus, rng);
            issue_requests(s, rng, res);
            message_subslot(s, res);
            content_subslot(s, res);
        }

        if (cfg_.collect_load) {
            const auto slots = static_cast<double>(horizon - cfg_.warmup);
            int64_t peak = 0;
            for (int64_t c : load_) peak = std::max(peak, c);
            res.max_load = static_cast<double>(peak) / slots;
        }
        return res;
    }

private:
    void place_copies(Xoshiro256pp& rng) {
        const auto M = static_cast<int64_t>(placement_.node_copies.size());
        node_holders_.assign(static_cast<size_t>(M), {});
        sbs_holders_.assign(static_cast<size_t>(M), {});
        assign_side(rng, placement_.node_copies, cfg_.nodes, p_.node_cache, node_holders_,
                    "node caches");
        assign_side(rng, placement_.sbs_copies, p_.sbs_count, p_.sbs_cache, sbs_holders_,
                    "box caches");
    }

    // Random placement of `copies[m]` distinct hosts per rank under a
    // per-host slot budget: ranks in decreasing demand take the hosts
    // with the most free slots (random tie order), which realizes every
    // feasible demand profile and keeps hosts exchangeable.
    void assign_side(Xoshiro256pp& rng, const std::vector<int64_t>& copies,
                     int64_t hosts, double slots_real,
                     std::vector<std::vector<int32_t>>& holders, const char* what) {
        const auto M = static_cast<int64_t>(copies.size());
        const auto slot_cap = static_cast<int64_t>(std::floor(slots_real + 1e-9));
        std::vector<int64_t> free_slots(static_cast<size_t>(hosts), slot_cap);
        std::vector<int64_t> order(static_cast<size_t>(M));
        std::iota(order.begin(), order.end(), int64_t{0});
        std::stable_sort(order.begin(), order.end(), [&](int64_t i, int64_t j) {
            return copies[static_cast<size_t>(i)] > copies[static_cast<size_t>(j)];
        });
        struct Cand { int64_t slots; uint64_t key; int32_t id; };
        std::vector<Cand> cands;
        cands.reserve(static_cast<size_t>(hosts));
        for (int64_t om = 0; om < M; ++om) {
            const int64_t m = order[static_cast<size_t>(om)];
            const int64_t want = copies[static_cast<size_t>(m)];
            if (want <= 0) continue;
            if (want > hosts)
                fail(Status::capacity, std::string("placement: rank demand exceeds ") + what);
            cands.clear();
            for (int64_t h = 0; h < hosts; ++h)
                if (free_slots[static_cast<size_t>(h)] > 0)
                    cands.push_back({free_slots[static_cast<size_t>(h)], rng.next(),
                                     static_cast<int32_t>(h)});
            if (static_cast<int64_t>(cands.size()) < want)
                fail(Status::capacity, std::string("placement: not enough free ") + what);
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                if (a.slots != b.slots) return a.slots > b.slots;
                if (a.key != b.key) return a.key < b.key;
                return a.id < b.id;
            });
            auto& hl = holders[static_cast<size_t>(m)];
            hl.reserve(static_cast<size_t>(want));
            for (int64_t k = 0; k < want; ++k) {
                hl.push_back(cands[static_cast<size_t>(k)].id);
                --free_slots[static_cast<size_t>(cands[static_cast<size_t>(k)].id)];
            }
            std::sort(hl.begin(), hl.end());
        }
    }

    bool cell_active(int64_t cx, int64_t cy, int64_t slot) const {
        const int64_t color = (cx % pitch_) * pitch_ + (cy % pitch_);
        return color == slot % period_;
    }

    void bump_load(int64_t cx, int64_t cy, int64_t slot) {
        if (cfg_.collect_load && slot >= cfg_.warmup)
            ++load_[static_cast<size_t>(cx * geo_.R + cy)];
    }

    void record_tx(int64_t slot, int sub, int band, int64_t scx, int64_t scy,
                   int64_t dcx, int64_t dcy, TrialResult& res) {
        if (!want_audit_) return;
        res.audit.push_back({slot, static_cast<int8_t>(sub), static_cast<int8_t>(band),
                             static_cast<int32_t>(scx), static_cast<int32_t>(scy),
                             static_cast<int32_t>(dcx), static_cast<int32_t>(dcy)});
    }

    int64_t sample_rank(Xoshiro256pp& rng) const {
        const double u = rng.next_double();
        const auto it = std::upper_bound(zipf_cum_.begin(), zipf_cum_.end(), u);
        auto idx = static_cast<int64_t>(it - zipf_cum_.begin());
        return std::min(idx, static_cast<int64_t>(zipf_cum_.size()) - 1);
    }

    // Closest current holder of `rank` to node i; nodes win distance ties
    // against SBSs of equal distance through the id order (node ids come
    // first). Returns the holder id and the physical distance.
    int64_t closest_holder(int64_t i, int64_t rank, double* dist) const {
        const auto& nh = node_holders_[static_cast<size_t>(rank)];
        const auto& sh = sbs_holders_[static_cast<size_t>(rank)];
        double best = std::numeric_limits<double>::infinity();
        int64_t who = -1;
        const auto Ld = static_cast<double>(geo_.L);
        for (int32_t h : nh) {
            const auto d2 = static_cast<double>(
                geo_.dist2_sub(xs_[static_cast<size_t>(i)], ys_[static_cast<size_t>(i)],
                               xs_[static_cast<size_t>(h)], ys_[static_cast<size_t>(h)]));
            const double d = d2 / (Ld * Ld);
            if (d < best) { best = d; who = h; }
        }
        for (int32_t h : sh) {
            const int64_t gx = h % geo_.G, gy = h / geo_.G;
            const double d = geo_.dist2_node_sbs(xs_[static_cast<size_t>(i)],
                                                 ys_[static_cast<size_t>(i)], gx, gy);
            if (d < best) { best = d; who = cfg_.nodes + h; }
        }
        if (who < 0) fail(Status::no_holder, "simulate: a rank has no holder");
        *dist = std::sqrt(std::max(0.0, best));
        return who;
    }

    int64_t node_cx(int64_t i) const { return geo_.cell_coord(xs_[static_cast<size_t>(i)]); }
    int64_t node_cy(int64_t i) const { return geo_.cell_coord(ys_[static_cast<size_t>(i)]); }

    void holder_cell(int64_t holder, int64_t* cx, int64_t* cy) const {
        if (holder < cfg_.nodes) {
            *cx = node_cx(holder);
            *cy = node_cy(holder);
        } else {
            const int64_t k = holder - cfg_.nodes;
            *cx = geo_.sbs_cell_coord(k % geo_.G);
            *cy = geo_.sbs_cell_coord(k / geo_.G);
        }
    }

    bool sbs_reached(int64_t cx, int64_t cy, int64_t k) const {
        const int64_t gx = k % geo_.G, gy = k / geo_.G;
        if (geo_.box_of_cell(cx) == gx && geo_.box_of_cell(cy) == gy) return true;
        return cx == geo_.sbs_cell_coord(gx) && cy == geo_.sbs_cell_coord(gy);
    }

    void deliver(Request& r, int64_t i, int64_t slot, TrialResult& res) {
        if (r.counted) {
            ++res.completed;
            // Definition-2 window: from the moment the requesting message
            // leaves the requester until the content arrives.
            res.delay_sum += slot - (r.launch >= 0 ? r.launch : r.issue) + 1;
            const auto hops = static_cast<size_t>(r.hops_msg + r.hops_cont);
            if (hops >= res.hops_hist.size()) res.hops_hist.resize(hops + 1, 0);
            ++res.hops_hist[hops];
        }
        r.active = false;
        next_issue_[static_cast<size_t>(i)] = slot + 1;
    }

    void issue_requests(int64_t s, Xoshiro256pp& rng, TrialResult& res) {
        const int64_t n = cfg_.nodes;
        for (int64_t i = 0; i < n; ++i) {
            auto& r = reqs_[static_cast<size_t>(i)];
            if (r.active || next_issue_[static_cast<size_t>(i)] > s) continue;
            const int64_t rank = sample_rank(rng);
            double dist = 0.0;
            const int64_t holder = closest_holder(i, rank, &dist);
            r = Request{};
            r.active = true;
            r.counted = s >= cfg_.warmup;
            r.rank = rank;
            r.issue = s;
            r.holder = holder;
            r.msg_cx = node_cx(i);
            r.msg_cy = node_cy(i);
            if (r.counted) {
                ++res.issued;
                res.dist_sum[static_cast<size_t>(rank)] += dist;
                ++res.dist_cnt[static_cast<size_t>(rank)];
            }
            if (holder < n && node_cx(holder) == r.msg_cx && node_cy(holder) == r.msg_cy) {
                // co-located holder: a single short-range exchange serves
                // the request within the issue slot
                r.launch = s;
                r.hops_msg = 0;
                r.hops_cont = 1;
                bump_load(r.msg_cx, r.msg_cy, s);
                record_tx(s, 1, 2, r.msg_cx, r.msg_cy, r.msg_cx, r.msg_cy, res);
                deliver(r, i, s, res);
            }
        }
    }

    void message_subslot(int64_t s, TrialResult& res) {
        const int64_t n = cfg_.nodes;
        for (int64_t i = 0; i < n; ++i) {
            auto& r = reqs_[static_cast<size_t>(i)];
            if (!r.active || r.phase1_done >= 0) continue;
            if (r.holder < n) {
                int64_t hx, hy;
                holder_cell(r.holder, &hx, &hy);
                if (r.msg_cx == hx && r.msg_cy == hy) {
                    r.phase1_done = s;  // holder shares the message's cell
                    if (r.launch < 0) r.launch = s;
                    continue;
                }
                if (!cell_active(r.msg_cx, r.msg_cy, s)) continue;
                const Chase c = step_toward(geo_, r.msg_cx, r.msg_cy, hx, hy);
                record_tx(s, 0, 0, r.msg_cx, r.msg_cy, c.cx, c.cy, res);
                r.msg_cx = c.cx;
                r.msg_cy = c.cy;
                ++r.hops_msg;
                if (r.launch < 0) r.launch = s;
                holder_cell(r.holder, &hx, &hy);
                if (r.msg_cx == hx && r.msg_cy == hy) r.phase1_done = s;
            } else {
                const int64_t k = r.holder - n;
                if (sbs_reached(r.msg_cx, r.msg_cy, k)) {
                    // final single hop up to the box station (infra band)
                    ++r.hops_msg;
                    record_tx(s, 0, 1, r.msg_cx, r.msg_cy, r.msg_cx, r.msg_cy, res);
                    r.phase1_done = s;
                    if (r.launch < 0) r.launch = s;
                    continue;
                }
                if (!cell_active(r.msg_cx, r.msg_cy, s)) continue;
                int64_t hx, hy;
                holder_cell(r.holder, &hx, &hy);
                const Chase c = step_toward(geo_, r.msg_cx, r.msg_cy, hx, hy);
                record_tx(s, 0, 0, r.msg_cx, r.msg_cy, c.cx, c.cy, res);
                r.msg_cx = c.cx;
                r.msg_cy = c.cy;
                ++r.hops_msg;
                if (r.launch < 0) r.launch = s;
            }
        }
    }

    void content_subslot(int64_t s, TrialResult& res) {
        const int64_t n = cfg_.nodes;
        for (int64_t i = 0; i < n; ++i) {
            auto& r = reqs_[static_cast<size_t>(i)];
            if (!r.active || r.phase1_done < 0 || r.phase1_done >= s) continue;
            const int64_t rx = node_cx(i), ry = node_cy(i);
            if (!r.launched) {
                if (r.holder < n) {
                    // content rides along with the holder until its cell
                    // gets a transmission opportunity
                    int64_t hx, hy;
                    holder_cell(r.holder, &hx, &hy);
                    if (hx == rx && hy == ry) {
                        ++r.hops_cont;
                        bump_load(hx, hy, s);
                        record_tx(s, 1, 2, hx, hy, hx, hy, res);
                        deliver(r, i, s, res);
                        continue;
                    }
                    if (!cell_active(hx, hy, s)) continue;
                    const Chase c = step_toward(geo_, hx, hy, rx, ry);
                    bump_load(hx, hy, s);
                    record_tx(s, 1, 0, hx, hy, c.cx, c.cy, res);
                    r.launched = true;
                    r.cont_cx = c.cx;
                    r.cont_cy = c.cy;
                    ++r.hops_cont;
                } else {
                    // downlink: the box station pushes the content to a
                    // relay in its routing cell (infra band, every slot)
                    const int64_t k = r.holder - n;
                    const int64_t hx = geo_.sbs_cell_coord(k % geo_.G);
                    const int64_t hy = geo_.sbs_cell_coord(k / geo_.G);
                    record_tx(s, 1, 1, hx, hy, hx, hy, res);
                    r.launched = true;
                    r.cont_cx = hx;
                    r.cont_cy = hy;
                    ++r.hops_cont;
                }
            } else {
                if (r.cont_cx == rx && r.cont_cy == ry) {
                    ++r.hops_cont;
                    bump_load(rx, ry, s);
                    record_tx(s, 1, 2, rx, ry, rx, ry, res);
                    deliver(r, i, s, res);
                    continue;
                }
                if (!cell_active(r.cont_cx, r.cont_cy, s)) continue;
                const Chase c = step_toward(geo_, r.cont_cx, r.cont_cy, rx, ry);
                bump_load(r.cont_cx, r.cont_cy, s);
                record_tx(s, 1, 0, r.cont_cx, r.cont_cy, c.cx, c.cy, res);
                r.cont_cx = c.cx;
                r.cont_cy = c.cy;
                ++r.hops_cont;
            }
            // a hop that lands in the requester's cell is received by the
            // requester itself and completes the delivery
            if (r.active && r.launched && r.cont_cx == node_cx(i) && r.cont_cy == node_cy(i))
                deliver(r, i, s, res);
        }
    }

    const SimConfig& cfg_;
    const Params& p_;
    const RoundedPlacement& placement_;
    const std::vector<double>& zipf_cum_;
    bool want_audit_;
    Geometry geo_;
    int64_t period_ = 1, pitch_ = 1;
    std::vector<int64_t> xs_, ys_;
    std::vector<std::vector<int32_t>> node_holders_, sbs_holders_;
    std::vector<Request> reqs_;
    std::vector<int64_t> next_issue_;
    std::vector<int64_t> load_;
};

} // namespace

SimOutcome run_experiment(const SimConfig& cfg, const Params& p,
                          const std::vector<double>& node_reps,
                          const std::vector<double>& sbs_reps,
                          std::vector<TxRecord>* audit) {
    cfg.validate();
    p.validate();
    if (cfg.nodes != p.nodes)
        fail(Status::invalid, "simulate: sim nodes and parameter nodes disagree");
    const RoundedPlacement placement = round_replicas(p, node_reps, sbs_reps);
    const std::vector<double> pmf = zipf_pmf_all(p.alpha, p.catalog);
    std::vector<double> cum(pmf.size());
    std::partial_sum(pmf.begin(), pmf.end(), cum.begin());
    cum.back() = 1.0;

    const int64_t T = cfg.trials;
    std::vector<TrialResult> results(static_cast<size_t>(T));
    int64_t want = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int64_t>(std::thread::hardware_concurrency());
    want = std::max<int64_t>(1, std::min(want, T));

    std::atomic<int64_t> next{0};
    std::mutex err_mutex;
    std::string err_msg;
    Status err_status = Status::ok;
    auto work = [&]() {
        TrialRunner runner(cfg, p, placement, cum, audit != nullptr);
        for (;;) {
            const int64_t t = next.fetch_add(1);
            if (t >= T) break;
            try {
                results[static_cast<size_t>(t)] = runner.run(t);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (err_status == Status::ok) { err_status = e.status(); err_msg = e.what(); }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (err_status == Status::ok) { err_status = Status::internal; err_msg = e.what(); }
            }
        }
    };
    if (want == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(want));
        for (int64_t w = 0; w < want; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (err_status != Status::ok) fail(err_status, err_msg);

    SimOutcome out;
    out.activation_period = cfg.period();
    out.per_rank_distance.assign(static_cast<size_t>(p.catalog), 0.0);
    std::vector<double> dsum(static_cast<size_t>(p.catalog), 0.0);
    std::vector<int64_t> dcnt(static_cast<size_t>(p.catalog), 0);
    std::vector<double> trial_means;
    trial_means.reserve(static_cast<size_t>(T));
    double load_sum = 0.0, tput_sum = 0.0;
    int64_t issued = 0;
    for (int64_t t = 0; t < T; ++t) {
        const TrialResult& r = results[static_cast<size_t>(t)];
        out.completed += r.completed;
        issued += r.issued;
        if (r.completed > 0)
            trial_means.push_back(static_cast<double>(r.delay_sum) /
                                  static_cast<double>(r.completed));
        for (size_t m = 0; m < dsum.size(); ++m) {
            dsum[m] += r.dist_sum[m];
            dcnt[m] += r.dist_cnt[m];
        }
        if (r.hops_hist.size() > out.hop_histogram.size())
            out.hop_histogram.resize(r.hops_hist.size(), 0);
        for (size_t h = 0; h < r.hops_hist.size(); ++h)
            out.hop_histogram[h] += r.hops_hist[h];
        load_sum += r.max_load;
        if (r.max_load > 0.0)
            tput_sum += (1.0 / static_cast<double>(out.activation_period)) / r.max_load;
        if (audit)
            audit->insert(audit->end(), r.audit.begin(), r.audit.end());
    }
    // Canonical histogram: drop the trailing zero bins left over from the
    // per-trial pre-allocation.
    while (!out.hop_histogram.empty() && out.hop_histogram.back() == 0)
        out.hop_histogram.pop_back();
    out.horizon_exceeded = issued - out.completed;
    if (out.completed == 0)
        fail(Status::horizon, "simulate: no request completed within the horizon");
    double total_d = 0.0;
    int64_t total_c = 0;
    for (size_t m = 0; m < dsum.size(); ++m) {
        out.per_rank_distance[m] = dcnt[m] > 0 ? dsum[m] / static_cast<double>(dcnt[m]) : 0.0;
        total_d += dsum[m];
        total_c += dcnt[m];
    }
    out.mean_initial_distance = total_c > 0 ? total_d / static_cast<double>(total_c) : 0.0;
    double mean = 0.0;
    for (double v : trial_means) mean += v;
    mean /= static_cast<double>(trial_means.size());
    out.mean_delay = mean;
    if (trial_means.size() > 1) {
        double ss = 0.0;
        for (double v : trial_means) ss += (v - mean) * (v - mean);
        out.delay_stderr = std::sqrt(ss / static_cast<double>(trial_means.size() - 1) /
                                     static_cast<double>(trial_means.size()));
    }
    out.max_cell_load = load_sum / static_cast<double>(T);
    out.achieved_throughput = tput_sum / static_cast<double>(T);
    return out;
}

std::vector<double> replica_distance_scan(const SimConfig& cfg,
                                          const std::vector<int64_t>& counts,
                                          double* slope) {
    cfg.validate();
    if (counts.empty()) fail(Status::invalid, "distance scan: needs at least one count");
    for (int64_t c : counts)
        if (c < 1 || c > cfg.nodes)
            fail(Status::invalid, "distance scan: counts must lie in [1, nodes]");
    const int64_t n = cfg.nodes;
    const int64_t L = cfg.side();
    const auto K = static_cast<int64_t>(counts.size());
    std::vector<double> means(static_cast<size_t>(K), 0.0);

    Geometry geo;
    geo.L = L;
    geo.torus = cfg.torus;

    for (int64_t k = 0; k < K; ++k) {
        const int64_t Rk = counts[static_cast<size_t>(k)];
        double total = 0.0;
        for (int64_t t = 0; t < cfg.trials; ++t) {
            Xoshiro256pp rng(cfg.seed,
                             static_cast<uint64_t>(k) * static_cast<uint64_t>(cfg.trials) +
                                 static_cast<uint64_t>(t));
            std::vector<int64_t> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
            for (int64_t i = 0; i < n; ++i) {
                xs[static_cast<size_t>(i)] = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(L)));
                ys[static_cast<size_t>(i)] = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(L)));
            }
            // holders: Rk distinct nodes via a partial Fisher-Yates pass
            std::vector<int64_t> idx(static_cast<size_t>(n));
            std::iota(idx.begin(), idx.end(), int64_t{0});
            for (int64_t j = 0; j < Rk; ++j) {
                const auto pick = j + static_cast<int64_t>(
                                          rng.next_below(static_cast<uint64_t>(n - j)));
                std::swap(idx[static_cast<size_t>(j)], idx[static_cast<size_t>(pick)]);
            }
            for (int64_t i = 0; i < n; ++i) {
                int64_t best = std::numeric_limits<int64_t>::max();
                for (int64_t j = 0; j < Rk; ++j) {
                    const int64_t h = idx[static_cast<size_t>(j)];
                    best = std::min(best,
                                    geo.dist2_sub(xs[static_cast<size_t>(i)], ys[static_cast<size_t>(i)],
                                                  xs[static_cast<size_t>(h)], ys[static_cast<size_t>(h)]));
                    if (best == 0) break;
                }
                total += std::sqrt(static_cast<double>(best)) / static_cast<double>(L);
            }
        }
        means[static_cast<size_t>(k)] =
            total / (static_cast<double>(n) * static_cast<double>(cfg.trials));
    }

    if (slope) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int64_t cnt = 0;
        for (int64_t k = 0; k < K; ++k) {
            if (!(means[static_cast<size_t>(k)] > 0.0)) continue;
            const double lx = std::log(static_cast<double>(counts[static_cast<size_t>(k)]));
            const double ly = std::log(means[static_cast<size_t>(k)]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        if (cnt < 2) fail(Status::invalid, "distance scan: slope needs two usable counts");
        const double den = static_cast<double>(cnt) * sxx - sx * sx;
        *slope = (static_cast<double>(cnt) * sxy - sx * sy) / den;
    }
    return means;
}

} // namespace cachenet
