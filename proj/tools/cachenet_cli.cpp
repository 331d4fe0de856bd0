// cachenet command-line driver.
//
// Subcommands: solve, reproduce-figs, regimes, simulate, compare.
// Reads a flat key=value config (defaults bundled in data/default.cfg),
// orchestrates the library through the public C API only, and writes
// schema-stable CSV or JSON tables. Exit codes: 0 success, 2 infeasible,
// 3 non-convergence, 4 figure-regression failure, 1 anything else.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cachenet.h"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------
// formatting and file helpers
// ---------------------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_int(int64_t v) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%" PRId64, v);
    return buf;
}

struct Cell {
    std::string text;
    bool quoted_string = false;  // true: JSON emits a string, not a number

    Cell(double v) : text(fmt(v)) {}
    Cell(int64_t v) : text(fmt_int(v)) {}
    Cell(int v) : text(fmt_int(v)) {}
    Cell(const char* s) : text(s), quoted_string(true) {}
    Cell(const std::string& s) : text(s), quoted_string(true) {}
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Emitter {
    std::filesystem::path dir;
    bool as_json = false;

    std::filesystem::path path_for(const std::string& stem) const {
        return dir / (stem + (as_json ? ".json" : ".csv"));
    }

    void write(const std::string& stem, const Table& t) const {
        const auto p = path_for(stem);
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        if (as_json) {
            json arr = json::array();
            for (const auto& row : t.rows) {
                json obj = json::object();
                for (size_t c = 0; c < t.columns.size() && c < row.size(); ++c) {
                    if (row[c].quoted_string)
                        obj[t.columns[c]] = row[c].text;
                    else
                        obj[t.columns[c]] = json::parse(row[c].text);
                }
                arr.push_back(std::move(obj));
            }
            f << arr.dump(2) << '\n';
        } else {
            for (size_t c = 0; c < t.columns.size(); ++c)
                f << (c ? "," : "") << t.columns[c];
            f << '\n';
            for (const auto& row : t.rows) {
                for (size_t c = 0; c < row.size(); ++c)
                    f << (c ? "," : "") << row[c].text;
                f << '\n';
            }
        }
        if (!f) throw std::runtime_error("short write to " + p.string());
    }

    void write_text(const std::string& name, const std::string& text) const {
        const auto p = dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        f << text;
    }
};

// ---------------------------------------------------------------------
// error handling: machine-readable record + exit-code mapping
// ---------------------------------------------------------------------

struct CliError {
    cn_status status;
    std::string message;
};

[[noreturn]] void bail(cn_status st, const std::string& msg) {
    throw CliError{st, msg};
}

void check(cn_status st, const std::string& what) {
    if (st == CN_OK) return;
    std::string detail = cn_last_error();
    bail(st, what + ": " + cn_strerror(st) + (detail.empty() ? "" : " — " + detail));
}

int exit_code_for(cn_status st) {
    switch (st) {
        case CN_OK: return 0;
        case CN_EINFEASIBLE: return 2;
        case CN_ENOCONVERGE: return 3;
        case CN_EREFMISMATCH: return 4;
        default: return 1;
    }
}

void write_error_record(const std::filesystem::path& dir, const std::string& command,
                        cn_status st, const std::string& message) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    json rec = {
        {"error",
         {{"command", command},
          {"status", static_cast<int>(st)},
          {"code", cn_strerror(st)},
          {"message", message}}},
    };
    std::ofstream f(dir / "error.json", std::ios::binary);
    if (f) f << rec.dump(2) << '\n';
}

// ---------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------

struct Config {
    // instance (bundled defaults)
    std::map<std::string, double> params = {
        {"nodes", 300}, {"catalog", 200},   {"sbs_count", 50},
        {"node_cache", 2}, {"sbs_cache", 75},
    };
    std::map<std::string, double> exponents;  // gamma, beta, delta (optional)
    std::vector<double> alphas = {0.55, 1.2};
    std::map<std::string, double> sim;   // keys without the "sim." prefix
    // closest-replica scan: a placement-law regression, so it runs on its
    // own (large) lattice rather than the instance size
    std::map<std::string, double> scan = {{"nodes", 10000}, {"trials", 200}};
    std::string outputs = "out";
    std::string format = "csv";
    double tolerance = 0.03;
    uint64_t seed = 20260815ULL;
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing garbage");
        return v;
    } catch (const std::exception&) {
        bail(CN_EPARSE, "config: value of '" + key + "' is not a number: '" + text + "'");
    }
}

void apply_config_line(Config& cfg, const std::string& key, const std::string& value) {
    static const char* const param_keys[] = {"nodes", "catalog", "sbs_count",
                                             "node_cache", "sbs_cache"};
    for (const char* k : param_keys) {
        if (key == k) {
            cfg.params[k] = parse_number(value, key);
            return;
        }
    }
    if (key == "gamma" || key == "beta" || key == "delta") {
        cfg.exponents[key] = parse_number(value, key);
        return;
    }
    if (key == "alphas" || key == "alpha") {
        cfg.alphas.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.alphas.push_back(parse_number(item, key));
        }
        if (cfg.alphas.empty()) bail(CN_EPARSE, "config: '" + key + "' lists no values");
        return;
    }
    if (key.rfind("sim.", 0) == 0) {
        cfg.sim[key.substr(4)] = parse_number(value, key);
        return;
    }
    if (key == "scan.nodes" || key == "scan.trials") {
        cfg.scan[key.substr(5)] = parse_number(value, key);
        return;
    }
    if (key == "outputs") {
        cfg.outputs = value;
        return;
    }
    if (key == "format") {
        if (value != "csv" && value != "json")
            bail(CN_EPARSE, "config: format must be csv or json, got '" + value + "'");
        cfg.format = value;
        return;
    }
    if (key == "tolerance") {
        cfg.tolerance = parse_number(value, key);
        return;
    }
    if (key == "seed") {
        cfg.seed = static_cast<uint64_t>(parse_number(value, key));
        return;
    }
    bail(CN_EPARSE, "config: unknown key '" + key + "'");
}

void load_config_file(Config& cfg, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) bail(CN_EIO, "cannot read config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            bail(CN_EPARSE, "config: line " + std::to_string(lineno) +
                                " is not 'key = value'");
        apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

// RAII wrappers for the C handles
struct ParamsDel { void operator()(cn_params* p) const { cn_params_free(p); } };
struct SolDel { void operator()(cn_solution* s) const { cn_solution_free(s); } };
struct CfgDel { void operator()(cn_simcfg* c) const { cn_simcfg_free(c); } };
struct OutDel { void operator()(cn_outcome* o) const { cn_outcome_free(o); } };
using ParamsPtr = std::unique_ptr<cn_params, ParamsDel>;
using SolPtr = std::unique_ptr<cn_solution, SolDel>;
using SimCfgPtr = std::unique_ptr<cn_simcfg, CfgDel>;
using OutcomePtr = std::unique_ptr<cn_outcome, OutDel>;

ParamsPtr make_params(const Config& cfg, double alpha) {
    ParamsPtr p(cn_params_new());
    if (!p) bail(CN_EINTERNAL, "out of memory");
    for (const auto& [k, v] : cfg.params)
        check(cn_params_set(p.get(), k.c_str(), v), "params." + k);
    for (const auto& [k, v] : cfg.exponents)
        check(cn_params_set(p.get(), k.c_str(), v), "params." + k);
    check(cn_params_set(p.get(), "alpha", alpha), "params.alpha");
    check(cn_params_validate(p.get()), "params");
    return p;
}

SimCfgPtr make_simcfg(const Config& cfg) {
    SimCfgPtr c(cn_simcfg_new());
    if (!c) bail(CN_EINTERNAL, "out of memory");
    check(cn_simcfg_set(c.get(), "nodes", cfg.params.at("nodes")), "sim.nodes");
    check(cn_simcfg_set(c.get(), "seed", static_cast<double>(cfg.seed)), "sim.seed");
    for (const auto& [k, v] : cfg.sim)
        check(cn_simcfg_set(c.get(), k.c_str(), v), "sim." + k);
    return c;
}

SolPtr solve_joint(const cn_params* p) {
    cn_solution* raw = nullptr;
    const cn_status st = cn_solve_joint(p, 0.0, &raw);
    SolPtr s(raw);
    if (st != CN_OK) check(st, "solve");
    return s;
}

struct Allocation {
    std::vector<double> node, sbs;
};

Allocation allocation_of(const cn_solution* s) {
    int64_t M = 0;
    check(cn_solution_size(s, &M), "solution size");
    Allocation a;
    a.node.resize(static_cast<size_t>(M));
    a.sbs.resize(static_cast<size_t>(M));
    for (int64_t m = 1; m <= M; ++m)
        check(cn_solution_replicas(s, m, &a.node[static_cast<size_t>(m - 1)],
                                   &a.sbs[static_cast<size_t>(m - 1)]),
              "solution replicas");
    return a;
}

std::string alpha_tag(double alpha) { return "alpha" + fmt(alpha); }

// ---------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------

void emit_allocation_table(const Emitter& em, const std::string& stem,
                           const cn_params* p, const Allocation& a, double alpha) {
    const auto M = static_cast<int64_t>(a.node.size());
    Table t;
    t.columns = {"m", "node_copies", "sbs_copies", "total_copies", "popularity"};
    double catalog = 0;
    check(cn_params_get(p, "catalog", &catalog), "catalog");
    for (int64_t m = 1; m <= M; ++m) {
        double pm = 0.0;
        check(cn_zipf_pmf(alpha, static_cast<int64_t>(catalog), m, &pm), "pmf");
        const auto i = static_cast<size_t>(m - 1);
        t.add({m, a.node[i], a.sbs[i], a.node[i] + a.sbs[i], pm});
    }
    em.write(stem, t);
}

int cmd_solve(const Config& cfg, const Emitter& em) {
    Table summary;
    summary.columns = {"alpha", "objective", "lambda_node", "mu_sbs", "kkt_residual"};
    for (double alpha : cfg.alphas) {
        ParamsPtr p = make_params(cfg, alpha);
        SolPtr s = solve_joint(p.get());
        const Allocation a = allocation_of(s.get());
        emit_allocation_table(em, "solve_" + alpha_tag(alpha), p.get(), a, alpha);
        double obj = 0, lam = 0, mu = 0, res = 0;
        check(cn_solution_objective(s.get(), &obj), "objective");
        check(cn_solution_certificate(s.get(), &lam, &mu, &res), "certificate");
        summary.add({alpha, obj, lam, mu, res});
    }
    em.write("solve_summary", summary);
    return 0;
}

int cmd_reproduce_figs(const Config& cfg, const Emitter& em) {
    // figure datasets from our solver at the two published skews
    const double skews[2] = {0.55, 1.2};
    const char* total_stems[2] = {"fig4a", "fig4b"};
    const char* split_stems[2] = {"fig5a", "fig5b"};
    for (int i = 0; i < 2; ++i) {
        ParamsPtr p = make_params(cfg, skews[i]);
        SolPtr s = solve_joint(p.get());
        const Allocation a = allocation_of(s.get());
        Table totals;
        totals.columns = {"m", "total_copies"};
        Table split;
        split.columns = {"m", "node_copies", "sbs_copies"};
        for (size_t m = 0; m < a.node.size(); ++m) {
            totals.add({static_cast<int64_t>(m + 1), a.node[m] + a.sbs[m]});
            split.add({static_cast<int64_t>(m + 1), a.node[m], a.sbs[m]});
        }
        em.write(total_stems[i], totals);
        em.write(split_stems[i], split);
    }

    ParamsPtr p = make_params(cfg, cfg.alphas.front());
    char* report = nullptr;
    const cn_status st = cn_reference_gate(p.get(), cfg.tolerance, &report);
    std::string text = report ? report : "";
    cn_text_free(report);
    em.write_text("figs_report.txt", text);
    fputs(text.c_str(), stdout);
    if (st != CN_OK && st != CN_EREFMISMATCH) check(st, "reference gate");
    if (st == CN_EREFMISMATCH)
        bail(st, "figure regression gate failed (see figs_report.txt)");
    return 0;
}

int cmd_regimes(const Config& cfg, const Emitter& em) {
    if (cfg.exponents.size() < 3)
        bail(CN_EMISSINGEXP, "regimes: gamma, beta and delta must be configured");
    const double beta = cfg.exponents.at("beta");

    // per-config-alpha summary at the exact configured exponents
    Table summary;
    summary.columns = {"alpha", "regime", "b",          "case_boundary",
                       "regime_boundary", "m1_exponent", "m2_exponent",
                       "m4_exponent"};
    const char* names[] = {"heavy", "moderate", "flat"};
    for (double alpha : cfg.alphas) {
        ParamsPtr p = make_params(cfg, alpha);
        cn_regime_report r{};
        check(cn_classify_regime(p.get(), &r), "classify");
        summary.add({alpha, names[r.regime], r.b, r.case_boundary, r.regime_boundary,
                     r.m1_exponent, r.m2_exponent, r.m4_exponent});
    }
    em.write("regime_summary", summary);

    // (alpha, delta) grid with gamma and beta fixed, for boundary replots
    Table grid;
    grid.columns = {"alpha", "delta", "regime", "b"};
    Table bounds;
    bounds.columns = {"delta", "case_boundary", "regime_boundary", "compare_threshold"};
    for (int di = 0; di <= 40; ++di) {
        const double delta = di * 0.025;
        if (delta >= 1.0 || beta + delta < 1.0) continue;
        Config point = cfg;
        point.exponents["delta"] = delta;
        bool wrote_bounds = false;
        for (int ai = 1; ai <= 62; ++ai) {
            const double alpha = ai * 0.025;
            ParamsPtr p = make_params(point, alpha);
            cn_regime_report r{};
            check(cn_classify_regime(p.get(), &r), "classify");
            grid.add({alpha, delta, names[r.regime], r.b});
            if (!wrote_bounds) {
                double thr = 0.0;
                cn_compare_verdict v{};
                check(cn_compare_strategies(p.get(), &v, &thr), "compare");
                bounds.add({delta, r.case_boundary, r.regime_boundary, thr});
                wrote_bounds = true;
            }
        }
    }
    em.write("regime_grid", grid);
    em.write("regime_boundaries", bounds);
    return 0;
}

Allocation load_allocation_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) bail(CN_EIO, "cannot read allocation file '" + path + "'");
    Allocation a;
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header row
        }
        std::stringstream ss(line);
        std::string rank, node, sbs;
        if (!std::getline(ss, rank, ',') || !std::getline(ss, node, ',') ||
            !std::getline(ss, sbs, ','))
            bail(CN_EPARSE, "allocation file line " + std::to_string(lineno) +
                                ": expected rank,node_copies,sbs_copies");
        const auto want = static_cast<size_t>(parse_number(trim(rank), "rank"));
        if (want != a.node.size() + 1)
            bail(CN_EPARSE, "allocation file line " + std::to_string(lineno) +
                                ": ranks must be 1,2,... in order");
        a.node.push_back(parse_number(trim(node), "node_copies"));
        a.sbs.push_back(parse_number(trim(sbs), "sbs_copies"));
    }
    if (a.node.empty()) bail(CN_EPARSE, "allocation file has no data rows");
    return a;
}

int cmd_simulate(const Config& cfg, const Emitter& em, const std::string& alloc_path) {
    SimCfgPtr sim = make_simcfg(cfg);
    Table summary;
    summary.columns = {"alpha",           "mean_delay",       "delay_stderr",
                       "mean_initial_distance", "max_cell_load",
                       "achieved_throughput",   "completed",
                       "horizon_exceeded",      "activation_period",
                       "theory_ratio"};

    std::vector<double> alphas = cfg.alphas;
    if (!alloc_path.empty()) alphas.resize(1);  // one allocation, one run

    for (double alpha : alphas) {
        ParamsPtr p = make_params(cfg, alpha);
        Allocation a;
        if (!alloc_path.empty()) {
            a = load_allocation_file(alloc_path);
            double catalog = 0;
            check(cn_params_get(p.get(), "catalog", &catalog), "catalog");
            if (a.node.size() != static_cast<size_t>(catalog))
                bail(CN_EINVAL, "allocation file rows must match the catalog size");
        } else {
            SolPtr s = solve_joint(p.get());
            a = allocation_of(s.get());
        }

        cn_outcome* raw = nullptr;
        const cn_status st = cn_run_experiment(sim.get(), p.get(), a.node.data(),
                                               a.sbs.data(), a.node.size(), &raw);
        OutcomePtr o(raw);
        check(st, "simulate");

        auto stat = [&](const char* key) {
            double v = 0;
            check(cn_outcome_stat(o.get(), key, &v), key);
            return v;
        };

        // shape constant of the delay law: measured delay over
        // sum_m p_m / sqrt(t_m)
        double shape = 0.0;
        for (size_t m = 0; m < a.node.size(); ++m) {
            double pm = 0.0;
            check(cn_zipf_pmf(alpha, static_cast<int64_t>(a.node.size()),
                              static_cast<int64_t>(m + 1), &pm),
                  "pmf");
            shape += pm / std::sqrt(std::max(1.0, a.node[m] + a.sbs[m]));
        }
        const double theory_ratio = stat("mean_delay") / shape;

        summary.add({alpha, stat("mean_delay"), stat("delay_stderr"),
                     stat("mean_initial_distance"), stat("max_cell_load"),
                     stat("achieved_throughput"),
                     static_cast<int64_t>(stat("completed")),
                     static_cast<int64_t>(stat("horizon_exceeded")),
                     static_cast<int64_t>(stat("activation_period")), theory_ratio});

        size_t hsize = 0;
        check(cn_outcome_hop_histogram(o.get(), nullptr, 0, &hsize), "histogram");
        std::vector<int64_t> hist(hsize);
        check(cn_outcome_hop_histogram(o.get(), hist.data(), hsize, &hsize), "histogram");
        Table ht;
        ht.columns = {"hops", "deliveries"};
        for (size_t h = 0; h < hist.size(); ++h)
            ht.add({static_cast<int64_t>(h), hist[h]});
        em.write("hop_histogram_" + alpha_tag(alpha), ht);

        size_t dsize = 0;
        check(cn_outcome_initial_distance(o.get(), nullptr, 0, &dsize), "distance");
        std::vector<double> dist(dsize);
        check(cn_outcome_initial_distance(o.get(), dist.data(), dsize, &dsize),
              "distance");
        Table dt;
        dt.columns = {"m", "mean_initial_distance"};
        for (size_t m = 0; m < dist.size(); ++m)
            dt.add({static_cast<int64_t>(m + 1), dist[m]});
        em.write("rank_distance_" + alpha_tag(alpha), dt);
    }
    em.write("sim_summary", summary);

    // closest-replica distance scan (placement law regression; a large
    // lattice keeps the distances clear of the subcell resolution floor)
    {
        SimCfgPtr scan(cn_simcfg_new());
        if (!scan) bail(CN_EINTERNAL, "out of memory");
        check(cn_simcfg_set(scan.get(), "nodes", cfg.scan.at("nodes")), "scan.nodes");
        check(cn_simcfg_set(scan.get(), "trials", cfg.scan.at("trials")), "scan.trials");
        check(cn_simcfg_set(scan.get(), "seed", static_cast<double>(cfg.seed)),
              "scan.seed");
        const int64_t counts[4] = {4, 16, 64, 256};
        const double nodes = cfg.scan.at("nodes");
        size_t usable = 0;
        while (usable < 4 && counts[usable] <= static_cast<int64_t>(nodes)) ++usable;
        if (usable >= 2) {
            std::vector<double> means(usable);
            double slope = 0.0;
            check(cn_replica_distance_scan(scan.get(), counts, usable, means.data(),
                                           &slope),
                  "distance scan");
            Table st;
            st.columns = {"replica_count", "mean_distance"};
            for (size_t i = 0; i < usable; ++i)
                st.add({counts[i], means[i]});
            em.write("distance_scan", st);
            Table fit;
            fit.columns = {"slope"};
            fit.add({slope});
            em.write("distance_scan_fit", fit);
        }
    }
    return 0;
}

int cmd_compare(const Config& cfg, const Emitter& em) {
    Table t;
    t.columns = {"alpha",          "objective_joint", "objective_baseline",
                 "objective_ratio", "verdict",        "verdict_threshold"};
    const bool have_exps = cfg.exponents.size() >= 3;
    for (double alpha : cfg.alphas) {
        ParamsPtr p = make_params(cfg, alpha);
        SolPtr joint = solve_joint(p.get());
        double obj_joint = 0;
        check(cn_solution_objective(joint.get(), &obj_joint), "objective");

        // baseline: nodes-only and SBS-only solved separately, then the
        // per-rank copies added into one placement
        cn_solution* raw = nullptr;
        cn_status st = cn_solve_baseline(p.get(), CN_BASELINE_NODES_ONLY, 0.0, &raw);
        SolPtr nodes_only(raw);
        check(st, "baseline nodes");
        raw = nullptr;
        st = cn_solve_baseline(p.get(), CN_BASELINE_SBS_ONLY, 0.0, &raw);
        SolPtr sbs_only(raw);
        check(st, "baseline SBS");
        const Allocation an = allocation_of(nodes_only.get());
        const Allocation ab = allocation_of(sbs_only.get());
        double obj_base = 0;
        check(cn_objective_of(p.get(), an.node.data(), ab.sbs.data(), an.node.size(),
                              &obj_base, nullptr),
              "baseline objective");

        std::string verdict = "n/a";
        double threshold = 0.0;
        if (have_exps) {
            cn_compare_verdict v{};
            const cn_status cs = cn_compare_strategies(p.get(), &v, &threshold);
            if (cs == CN_OK)
                verdict = v == CN_COMPARE_JOINT_WINS ? "joint_wins" : "equal_order";
            else if (cs != CN_ENOTAPPLICABLE)
                check(cs, "compare verdict");
            else
                threshold = 0.0;
        }
        t.add({alpha, obj_joint, obj_base, obj_joint / obj_base, verdict, threshold});
    }
    em.write("compare", t);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cachenet: replica placement, scaling laws and delivery simulation"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path, out_dir, format, alloc_path;
    std::vector<double> alphas;
    double tolerance = -1.0;
    int64_t seed = -1;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--alpha", alphas, "popularity skew (repeatable; overrides config)");
    app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_option("--out", out_dir, "output directory (default from config)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tolerance", tolerance, "figure-gate relative tolerance");

    CLI::App* sc_solve = app.add_subcommand("solve", "solve the placement problem");
    CLI::App* sc_figs =
        app.add_subcommand("reproduce-figs", "regenerate figure datasets and run the gate");
    CLI::App* sc_regimes =
        app.add_subcommand("regimes", "regime classification over an (alpha, delta) grid");
    CLI::App* sc_sim = app.add_subcommand("simulate", "run the delivery simulation");
    sc_sim->add_option("--allocation", alloc_path,
                       "CSV allocation (rank,node_copies,sbs_copies) to simulate");
    CLI::App* sc_compare =
        app.add_subcommand("compare", "joint vs separately-optimized baseline");

    CLI11_PARSE(app, argc, argv);

    Config cfg;
    std::string command = "?";
    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (!alphas.empty()) cfg.alphas = alphas;
        if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
        if (!out_dir.empty()) cfg.outputs = out_dir;
        if (!format.empty()) cfg.format = format;
        if (tolerance > 0) cfg.tolerance = tolerance;
        for (double a : cfg.alphas)
            if (!(a > 0)) bail(CN_EINVAL, "alpha values must be positive");

        Emitter em;
        em.dir = cfg.outputs;
        em.as_json = cfg.format == "json";
        std::filesystem::create_directories(em.dir);

        if (sc_solve->parsed()) {
            command = "solve";
            return cmd_solve(cfg, em);
        }
        if (sc_figs->parsed()) {
            command = "reproduce-figs";
            return cmd_reproduce_figs(cfg, em);
        }
        if (sc_regimes->parsed()) {
            command = "regimes";
            return cmd_regimes(cfg, em);
        }
        if (sc_sim->parsed()) {
            command = "simulate";
            return cmd_simulate(cfg, em, alloc_path);
        }
        if (sc_compare->parsed()) {
            command = "compare";
            return cmd_compare(cfg, em);
        }
        bail(CN_EINVAL, "no subcommand given");
    } catch (const CliError& e) {
        fprintf(stderr, "error: %s\n", e.message.c_str());
        // An explicit --out wins even when the config itself failed to load.
        write_error_record(out_dir.empty() ? cfg.outputs : out_dir, command,
                           e.status, e.message);
        return exit_code_for(e.status);
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        write_error_record(out_dir.empty() ? cfg.outputs : out_dir, command,
                           CN_EINTERNAL, e.what());
        return 1;
    }
}
