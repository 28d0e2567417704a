#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rcm/csv.hpp"
#include "rcm/runner.hpp"

using namespace rcm;
using namespace rcm::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "rcmlab_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), {});
}

nlohmann::json psi_config(const fs::path& out, std::uint64_t seed,
                          unsigned threads) {
    return {{"subcommand", "estimate-psi"},
            {"seed", seed},
            {"threads", threads},
            {"out_dir", out.string()},
            {"g", {{"family", "indicator"}, {"radius", 1.0}, {"dim", 2}}},
            {"lambda", 0.4},
            {"L", 8.0},
            {"n_max", 6},
            {"reps", 600}};
}

}  // namespace

TEST_CASE("config validation lists offending fields and rejects unknown keys") {
    nlohmann::json bad = {{"subcommand", "estimate-psi"},
                          {"seed", 1},
                          {"g", {{"family", "indicator"}, {"radius", 1.0}, {"dim", 2}}},
                          {"lambda", -1.0},
                          {"L", 8.0},
                          {"n_max", 4},
                          {"reps", 200},
                          {"bogus_knob", 3}};
    try {
        (void)parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        bool saw_lambda = false, saw_bogus = false;
        for (const auto& f : e.fields) {
            saw_lambda = saw_lambda || f.find("lambda") != std::string::npos;
            saw_bogus = saw_bogus || f.find("bogus_knob") != std::string::npos;
        }
        CHECK(saw_lambda);
        CHECK(saw_bogus);
    }

    nlohmann::json missing = {{"subcommand", "estimate-mh"}, {"seed", 1}};
    CHECK_THROWS_AS((void)parse_config(missing), ConfigError);
    nlohmann::json unknown_sub = {{"subcommand", "no-such"}, {"seed", 1}};
    CHECK_THROWS_AS((void)parse_config(unknown_sub), ConfigError);
}

TEST_CASE("a manifest reproduces its config") {
    const auto dir = fresh_dir("manifest-roundtrip");
    const auto cfg = parse_config(psi_config(dir, 5, 1));
    nlohmann::json manifest = {{"tool", "rcm_lab"}, {"config", cfg.to_json()}};
    const auto again = parse_config(manifest);
    CHECK(again.subcommand == cfg.subcommand);
    CHECK(again.seed == cfg.seed);
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("connection_from_json covers families, cutoffs and errors") {
    const auto ind = connection_from_json(
        {{"family", "indicator"}, {"radius", 1.5}, {"dim", 2}});
    CHECK(ind.support_radius() == 1.5);
    const auto cut = connection_from_json(
        {{"family", "exponential"}, {"beta", 1.0}, {"dim", 2}, {"cutoff", 2.0}});
    CHECK(cut.support_radius() == 2.0);
    CHECK_THROWS_AS((void)connection_from_json({{"family", "indicator"}, {"dim", 2}}),
                    ConfigError);
    CHECK_THROWS_AS((void)connection_from_json({{"family", "indicator"},
                                                {"radius", 1.0},
                                                {"dim", 2},
                                                {"typo", 1}}),
                    ConfigError);

    // Table profiles load from CSV.
    const auto dir = fresh_dir("table-load");
    const auto tpath = dir / "profile.csv";
    write_text_atomic(tpath.string(), "radius,value\n1.0,0.5\n2.0,0.0\n");
    const auto tab = connection_from_json(
        {{"family", "table"}, {"table_path", tpath.string()}, {"dim", 2}});
    CHECK(tab.profile(0.5) == 0.5);
    CHECK(tab.profile(1.5) == 0.0);
}

TEST_CASE("runner writes results, manifest and summary") {
    const auto dir = fresh_dir("runner-smoke");
    const auto result = run(parse_config(psi_config(dir, 9, 1)));
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "summary.txt"));

    const auto table = read_csv((dir / "results.csv").string());
    CHECK(table.rows.size() == 6);
    CHECK(table.number(0, table.column("value")) == 1.0);  // psi_1

    // The manifest alone reproduces the run byte for byte, regardless of the
    // thread count.
    const auto first = slurp(dir / "results.csv");
    const auto dir2 = fresh_dir("runner-smoke-again");
    auto cfg2 = load_config_file((dir / "manifest.json").string());
    cfg2.out_dir = dir2.string();
    cfg2.threads = 3;
    const auto rerun = run(cfg2);
    CHECK(rerun.exit_code == 0);
    CHECK(slurp(dir2 / "results.csv") == first);

    // A different seed changes the bytes.
    const auto dir3 = fresh_dir("runner-smoke-seed");
    const auto other = run(parse_config(psi_config(dir3, 10, 1)));
    CHECK(slurp(dir3 / "results.csv") != first);
}

TEST_CASE("validation failures leave no files behind") {
    const auto dir = fresh_dir("no-files");
    nlohmann::json bad = psi_config(dir, 1, 1);
    bad["lambda"] = -2.0;
    CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("assertion subcommands exit zero on their default suites") {
    const auto dir = fresh_dir("verify-suites");
    const auto lecam = run(parse_config({{"subcommand", "lecam-table"},
                                         {"seed", 1},
                                         {"out_dir", (dir / "lecam").string()},
                                         {"n_max", 10},
                                         {"p_step", 0.05},
                                         {"p_max", 0.5}}));
    CHECK(lecam.exit_code == 0);
    const auto table = read_csv((dir / "lecam" / "results.csv").string());
    CHECK(table.rows.size() == 10 * 10);

    const auto cramer = run(parse_config({{"subcommand", "cramer-check"},
                                          {"seed", 1},
                                          {"out_dir", (dir / "cramer").string()},
                                          {"grid_points", 100}}));
    CHECK(cramer.exit_code == 0);

    const auto dom = run(parse_config({{"subcommand", "domination-check"},
                                       {"seed", 1},
                                       {"out_dir", (dir / "dom").string()}}));
    CHECK(dom.exit_code == 0);

    const auto piv = run(parse_config({{"subcommand", "verify-pivotal"},
                                       {"seed", 1},
                                       {"out_dir", (dir / "piv").string()},
                                       {"max_nonroot", 2}}));
    CHECK(piv.exit_code == 0);
}

TEST_CASE("g2-oracle runs explicit points") {
    const auto dir = fresh_dir("g2");
    const auto result = run(parse_config(
        {{"subcommand", "g2-oracle"},
         {"seed", 3},
         {"out_dir", dir.string()},
         {"g", {{"family", "exponential"}, {"beta", 1.0}, {"dim", 2}}},
         {"points", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}},
         {"mc_reps", 20000}}));
    CHECK(result.exit_code == 0);
    const auto table = read_csv((dir / "results.csv").string());
    CHECK(table.rows.size() == 1);
    CHECK(std::fabs(table.number(0, table.column("z"))) < 3.5);
}

TEST_CASE("plot-data transforms decay and trend results") {
    const auto dir = fresh_dir("plots");
    // Decay: log_value must match ln(value) to 1e-12.
    const auto psi_dir = dir / "psi";
    (void)run(parse_config(psi_config(psi_dir, 4, 1)));
    emit_plot_data((psi_dir / "results.csv").string(), "decay",
                   (dir / "plot_decay.csv").string());
    const auto before = read_csv((psi_dir / "results.csv").string());
    const auto decay = read_csv((dir / "plot_decay.csv").string());
    REQUIRE(decay.rows.size() >= 1);
    std::size_t di = 0;
    for (std::size_t r = 0; r < before.rows.size(); ++r) {
        const double v = before.number(r, before.column("value"));
        if (!(v > 0.0)) continue;
        CHECK(std::fabs(decay.number(di, decay.column("log_value")) - std::log(v)) <
              1e-12);
        ++di;
    }
    CHECK(di == decay.rows.size());

    // Trend: per-N quartile rows from raw (N, rep, value) data.
    const auto raw_path = dir / "raw.csv";
    write_text_atomic(raw_path.string(),
                      "N,rep,value\n1,0,0.5\n1,1,0.7\n1,2,0.6\n4,0,0.3\n4,1,0.1\n4,2,0.2\n");
    emit_plot_data(raw_path.string(), "trend", (dir / "plot_trend.csv").string());
    const auto trend = read_csv((dir / "plot_trend.csv").string());
    REQUIRE(trend.rows.size() == 2);
    CHECK(trend.number(0, trend.column("median")) == doctest::Approx(0.6));
    CHECK(trend.number(1, trend.column("median")) == doctest::Approx(0.2));

    // Malformed and empty inputs are rejected.
    const auto ragged = dir / "ragged.csv";
    write_text_atomic(ragged.string(), "n,value\n1,0.5,9\n");
    CHECK_THROWS((void)emit_plot_data(ragged.string(), "decay",
                                      (dir / "x.csv").string()));
    const auto empty = dir / "empty.csv";
    write_text_atomic(empty.string(), "n,value,ci_lo,ci_hi\n");
    CHECK_THROWS((void)emit_plot_data(empty.string(), "decay",
                                      (dir / "y.csv").string()));
}

TEST_CASE("sample subcommand dumps points, edges and bitstrings") {
    const auto dir = fresh_dir("sample-dump");
    const auto result = run(parse_config(
        {{"subcommand", "sample"},
         {"seed", 12},
         {"out_dir", dir.string()},
         {"g", {{"family", "indicator"}, {"radius", 1.0}, {"dim", 2}}},
         {"lambda", 0.8},
         {"L", 6.0},
         {"site_p", 0.5},
         {"ghost_h", 0.4}}));
    CHECK(result.exit_code == 0);
    const auto pts = read_csv((dir / "points.csv").string());
    CHECK(pts.header ==
          std::vector<std::string>{"id", "x1", "x2", "site", "ghost"});
    const auto edges = read_csv((dir / "edges.csv").string());
    for (std::size_t r = 0; r < edges.rows.size(); ++r)
        CHECK(edges.number(r, 0) < edges.number(r, 1));
}
