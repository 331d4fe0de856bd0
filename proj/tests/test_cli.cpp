// End-to-end tests for the command-line driver: exit codes, output file
// schemas, byte-reproducibility, the machine-readable error record, and
// agreement between shipped reference CSVs and the embedded gate tables.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "figures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Paths are injected by the build (absolute).
const std::string kCli = CACHENET_CLI_PATH;
const std::string kDefaultCfg = CACHENET_CONFIG_PATH;
const std::string kRefDir = CACHENET_DATA_DIR;

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    REQUIRE(f.good());
    f << text;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path("cli_scratch") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Parses a CSV file into header + rows of cells.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    Csv csv;
    std::string line;
    REQUIRE(std::getline(f, line));
    csv.header = split_csv(line);
    while (std::getline(f, line)) {
        if (!line.empty()) csv.rows.push_back(split_csv(line));
    }
    return csv;
}

size_t column_of(const Csv& csv, const std::string& name) {
    for (size_t c = 0; c < csv.header.size(); ++c)
        if (csv.header[c] == name) return c;
    FAIL("missing column " << name);
    return 0;
}

double cell_num(const Csv& csv, size_t row, const std::string& name) {
    return std::stod(csv.rows.at(row).at(column_of(csv, name)));
}

} // namespace

TEST_CASE("solve: schema, values, and byte-identical reruns") {
    const fs::path dir = scratch("solve");
    const fs::path cfg = dir / "tiny.cfg";
    write_file(cfg,
               "nodes = 300\ncatalog = 1\nsbs_count = 50\n"
               "node_cache = 2\nsbs_cache = 75\n");

    const fs::path out1 = dir / "out1";
    const fs::path out2 = dir / "out2";
    CHECK(run_cli("--config " + cfg.string() + " --alpha 1 --out " +
                  out1.string() + " solve") == 0);
    CHECK(run_cli("--config " + cfg.string() + " --alpha 1 --out " +
                  out2.string() + " solve") == 0);

    const fs::path table = out1 / "solve_alpha1.csv";
    REQUIRE(fs::exists(table));
    const std::string bytes = slurp(table);
    CHECK(bytes.rfind("m,node_copies,sbs_copies,total_copies,popularity\n",
                      0) == 0);
    CHECK(bytes == slurp(out2 / "solve_alpha1.csv"));
    CHECK(slurp(out1 / "solve_summary.csv") ==
          slurp(out2 / "solve_summary.csv"));

    // A one-content catalog pins the whole caches on that content.
    const Csv csv = read_csv(table);
    REQUIRE(csv.rows.size() == 1);
    CHECK(cell_num(csv, 0, "m") == 1.0);
    CHECK(cell_num(csv, 0, "node_copies") == doctest::Approx(300).epsilon(1e-9));
    CHECK(cell_num(csv, 0, "sbs_copies") == doctest::Approx(50).epsilon(1e-9));
    CHECK(cell_num(csv, 0, "total_copies") == doctest::Approx(350).epsilon(1e-9));
    CHECK(cell_num(csv, 0, "popularity") == 1.0);
}

TEST_CASE("solve: bundled instance reproduces the frozen head allocation") {
    const fs::path out = scratch("solve_default") / "out";
    CHECK(run_cli("--config " + kDefaultCfg + " --alpha 0.55 --out " +
                  out.string() + " solve") == 0);
    const Csv csv = read_csv(out / "solve_alpha0.55.csv");
    REQUIRE(csv.rows.size() == 200);
    CHECK(cell_num(csv, 0, "node_copies") ==
          doctest::Approx(54.0754436781).epsilon(1e-8));
    CHECK(cell_num(csv, 0, "sbs_copies") ==
          doctest::Approx(44.1651704879).epsilon(1e-8));
    const Csv summary = read_csv(out / "solve_summary.csv");
    REQUIRE(summary.rows.size() == 1);
    CHECK(cell_num(summary, 0, "objective") ==
          doctest::Approx(0.198891492663).epsilon(1e-8));
    CHECK(cell_num(summary, 0, "kkt_residual") <= 1e-8);
}

TEST_CASE("solve: json output parses and mirrors the csv schema") {
    const fs::path dir = scratch("solve_json");
    const fs::path cfg = dir / "tiny.cfg";
    write_file(cfg,
               "nodes = 300\ncatalog = 1\nsbs_count = 50\n"
               "node_cache = 2\nsbs_cache = 75\n");
    const fs::path out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() +
                  " --alpha 1 --format json --out " + out.string() +
                  " solve") == 0);
    const json table = json::parse(slurp(out / "solve_alpha1.json"));
    REQUIRE(table.is_array());
    REQUIRE(table.size() == 1);
    CHECK(table[0]["m"].get<int64_t>() == 1);
    CHECK(table[0]["total_copies"].get<double>() ==
          doctest::Approx(350).epsilon(1e-9));
    const json summary = json::parse(slurp(out / "solve_summary.json"));
    CHECK(summary[0]["alpha"].get<double>() == 1.0);
    CHECK(summary[0]["objective"].get<double>() ==
          doctest::Approx(1.0 / std::sqrt(350.0)).epsilon(1e-9));
}

TEST_CASE("reproduce-figs: gate passes at the shipped tolerance") {
    const fs::path out = scratch("figs_ok") / "out";
    CHECK(run_cli("--config " + kDefaultCfg + " --out " + out.string() +
                  " reproduce-figs") == 0);
    for (const char* stem : {"fig4a", "fig4b", "fig5a", "fig5b"})
        CHECK(fs::exists(out / (std::string(stem) + ".csv")));
    const std::string report = slurp(out / "figs_report.txt");
    CHECK(!report.empty());
    CHECK(!fs::exists(out / "error.json"));
}

TEST_CASE("reproduce-figs: an absurd tolerance trips exit code 4") {
    const fs::path out = scratch("figs_tight") / "out";
    CHECK(run_cli("--config " + kDefaultCfg + " --tolerance 1e-6 --out " +
                  out.string() + " reproduce-figs") == 4);
    CHECK(fs::exists(out / "figs_report.txt"));
    const json err = json::parse(slurp(out / "error.json"));
    CHECK(err["error"]["command"].get<std::string>() == "reproduce-figs");
    CHECK(err["error"]["status"].get<int>() == 4);
    CHECK(err["error"]["code"].get<std::string>() ==
          "reference regression gate failed");
}

TEST_CASE("regimes: needs exponents; writes classification tables") {
    const fs::path out_err = scratch("regimes_err") / "out";
    CHECK(run_cli("--out " + out_err.string() + " regimes") == 1);
    const json err = json::parse(slurp(out_err / "error.json"));
    CHECK(err["error"]["code"].get<std::string>() ==
          "scaling exponents missing");
    CHECK(err["error"]["command"].get<std::string>() == "regimes");

    const fs::path out = scratch("regimes_ok") / "out";
    CHECK(run_cli("--config " + kDefaultCfg + " --out " + out.string() +
                  " regimes") == 0);
    const Csv summary = read_csv(out / "regime_summary.csv");
    REQUIRE(summary.rows.size() == 2);
    const size_t regime_col = column_of(summary, "regime");
    CHECK(summary.rows[0][regime_col] == "flat");      // alpha 0.55
    CHECK(summary.rows[1][regime_col] == "moderate");  // alpha 1.2
    CHECK(cell_num(summary, 0, "b") == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(cell_num(summary, 1, "b") == doctest::Approx(0.186).epsilon(1e-9));
    CHECK(fs::exists(out / "regime_grid.csv"));
    CHECK(fs::exists(out / "regime_boundaries.csv"));
}

TEST_CASE("simulate: summary, histogram and distance-scan outputs") {
    const fs::path dir = scratch("simulate");
    const fs::path cfg = dir / "sim.cfg";
    write_file(cfg,
               "nodes = 300\ncatalog = 200\nsbs_count = 50\n"
               "node_cache = 2\nsbs_cache = 75\n"
               "alphas = 1.2\nseed = 7\n"
               "sim.horizon = 120\nsim.trials = 1\nsim.threads = 1\n"
               "scan.nodes = 2000\nscan.trials = 10\n");
    const fs::path out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() +
                  " simulate") == 0);

    const Csv summary = read_csv(out / "sim_summary.csv");
    REQUIRE(summary.rows.size() == 1);
    CHECK(cell_num(summary, 0, "alpha") == 1.2);
    CHECK(cell_num(summary, 0, "mean_delay") > 0.0);
    CHECK(cell_num(summary, 0, "completed") > 0.0);
    CHECK(cell_num(summary, 0, "activation_period") == 49.0);
    CHECK(cell_num(summary, 0, "max_cell_load") > 0.0);

    const Csv hist = read_csv(out / "hop_histogram_alpha1.2.csv");
    double deliveries = 0.0;
    for (size_t r = 0; r < hist.rows.size(); ++r)
        deliveries += cell_num(hist, r, "deliveries");
    CHECK(deliveries == cell_num(summary, 0, "completed"));

    const Csv rank_dist = read_csv(out / "rank_distance_alpha1.2.csv");
    CHECK(rank_dist.rows.size() == 200);

    const Csv scan = read_csv(out / "distance_scan.csv");
    REQUIRE(scan.rows.size() == 4);
    for (size_t r = 1; r < scan.rows.size(); ++r)
        CHECK(cell_num(scan, r, "mean_distance") <
              cell_num(scan, r - 1, "mean_distance"));
    const Csv fit = read_csv(out / "distance_scan_fit.csv");
    const double slope = cell_num(fit, 0, "slope");
    CHECK(slope < -0.3);
    CHECK(slope > -0.7);
}

TEST_CASE("simulate: explicit allocation files") {
    const fs::path dir = scratch("simulate_alloc");
    const fs::path cfg = dir / "sim.cfg";
    write_file(cfg,
               "nodes = 300\ncatalog = 4\nsbs_count = 0\n"
               "node_cache = 1\nsbs_cache = 0\n"
               "alphas = 1\nseed = 5\n"
               "sim.horizon = 100\nsim.trials = 1\nsim.threads = 1\n"
               "scan.nodes = 500\nscan.trials = 5\n");
    const fs::path alloc = dir / "alloc.csv";
    write_file(alloc,
               "m,node_copies,sbs_copies\n"
               "1,40,0\n2,30,0\n3,20,0\n4,10,0\n");
    const fs::path out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() +
                  " simulate --allocation " + alloc.string()) == 0);
    const Csv summary = read_csv(out / "sim_summary.csv");
    REQUIRE(summary.rows.size() == 1);
    CHECK(cell_num(summary, 0, "completed") > 0.0);
    CHECK(fs::exists(out / "hop_histogram_alpha1.csv"));

    // Ranks out of order are a parse failure, not a silent reorder.
    const fs::path bad = dir / "bad.csv";
    write_file(bad, "m,node_copies,sbs_copies\n2,30,0\n1,40,0\n");
    const fs::path out_bad = dir / "out_bad";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out_bad.string() +
                  " simulate --allocation " + bad.string()) == 1);
    const json err = json::parse(slurp(out_bad / "error.json"));
    CHECK(err["error"]["code"].get<std::string>() == "parse failure");
}

TEST_CASE("compare: joint beats the split baseline only under high skew") {
    const fs::path out = scratch("compare") / "out";
    CHECK(run_cli("--config " + kDefaultCfg + " --alpha 0.55 --alpha 1.2 --out " +
                  out.string() + " compare") == 0);
    const Csv t = read_csv(out / "compare.csv");
    REQUIRE(t.rows.size() == 2);
    const size_t verdict_col = column_of(t, "verdict");

    CHECK(cell_num(t, 0, "alpha") == 0.55);
    const double ratio_low = cell_num(t, 0, "objective_ratio");
    CHECK(ratio_low == doctest::Approx(0.998024820205).epsilon(1e-6));
    CHECK(ratio_low > 0.9);
    CHECK(ratio_low < 1.1);
    CHECK(t.rows[0][verdict_col] == "equal_order");

    CHECK(cell_num(t, 1, "alpha") == 1.2);
    const double ratio_high = cell_num(t, 1, "objective_ratio");
    CHECK(ratio_high == doctest::Approx(0.907262657275).epsilon(1e-6));
    CHECK(ratio_high < 1.0);
    CHECK(t.rows[1][verdict_col] == "joint_wins");
    CHECK(cell_num(t, 1, "verdict_threshold") ==
          doctest::Approx(1.1481481481481481).epsilon(1e-9));
}

TEST_CASE("error records: infeasible instances exit 2") {
    const fs::path dir = scratch("infeasible");
    const fs::path cfg = dir / "big.cfg";
    write_file(cfg,
               "nodes = 300\ncatalog = 5000\nsbs_count = 50\n"
               "node_cache = 2\nsbs_cache = 75\n");
    const fs::path out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() + " --alpha 1 --out " +
                  out.string() + " solve") == 2);
    const json err = json::parse(slurp(out / "error.json"));
    CHECK(err["error"]["status"].get<int>() == 2);
    CHECK(err["error"]["code"].get<std::string>() == "infeasible instance");
    CHECK(err["error"]["command"].get<std::string>() == "solve");
    CHECK(!err["error"]["message"].get<std::string>().empty());
}

TEST_CASE("bad invocations are rejected") {
    const fs::path dir = scratch("bad_invoke");
    CHECK(run_cli("--bogus solve 2> /dev/null") != 0);
    CHECK(run_cli("2> /dev/null") != 0);  // a subcommand is required

    const fs::path cfg = dir / "bad.cfg";
    write_file(cfg, "bogus_key = 1\n");
    const fs::path out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() +
                  " solve") == 1);
    const json err = json::parse(slurp(out / "error.json"));
    CHECK(err["error"]["code"].get<std::string>() == "parse failure");

    CHECK(run_cli("--alpha -1 --out " + (dir / "out2").string() + " solve") ==
          1);
}

TEST_CASE("shipped reference tables match the embedded gate data") {
    // fig4*: rank,total_copies; fig5*: rank,node_copies,sbs_copies with
    // empty cells where a curve has no sample at that rank.
    const auto curve_of = [](const Csv& csv, const std::string& col) {
        const size_t rank_col = column_of(csv, "rank");
        const size_t val_col = column_of(csv, col);
        std::vector<std::pair<int, double>> out;
        for (const auto& row : csv.rows)
            if (val_col < row.size() && !row[val_col].empty())
                out.emplace_back(std::stoi(row[rank_col]),
                                 std::stod(row[val_col]));
        return out;
    };
    const auto check_curve = [&](const Csv& csv, const std::string& col,
                                 const std::vector<cachenet::RefPoint>& ref) {
        const auto got = curve_of(csv, col);
        REQUIRE(got.size() == ref.size());
        for (size_t r = 0; r < ref.size(); ++r) {
            CHECK(got[r].first == ref[r].rank);
            CHECK(got[r].second == ref[r].value);
        }
    };
    const fs::path ref_dir(kRefDir);
    check_curve(read_csv(ref_dir / "fig4a.csv"), "total_copies",
                cachenet::ref_total_low_skew());
    check_curve(read_csv(ref_dir / "fig4b.csv"), "total_copies",
                cachenet::ref_total_high_skew());
    const Csv low = read_csv(ref_dir / "fig5a.csv");
    check_curve(low, "node_copies", cachenet::ref_node_low_skew());
    check_curve(low, "sbs_copies", cachenet::ref_sbs_low_skew());
    const Csv high = read_csv(ref_dir / "fig5b.csv");
    check_curve(high, "node_copies", cachenet::ref_node_high_skew());
    check_curve(high, "sbs_copies", cachenet::ref_sbs_high_skew());
}
