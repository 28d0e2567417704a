#include "rcm/runner.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "rcm/csv.hpp"
#include "rcm/estimators.hpp"
#include "rcm/exact.hpp"
#include "rcm/percolation.hpp"

namespace rcm::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

struct OutputBundle {
    const ExperimentConfig& cfg;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::ostringstream summary;

    explicit OutputBundle(const ExperimentConfig& c) : cfg(c) {}

    void add_csv(const std::string& name, const CsvWriter& w) {
        std::string content = w.buffer();
        if (!content.empty() && content.back() != '\n') content += '\n';
        files.emplace_back(name, content);
    }

    // Writes everything (results, manifest, summary) atomically, after the
    // computation has finished.
    std::vector<std::string> flush() {
        fs::create_directories(cfg.out_dir);
        std::vector<std::string> written;
        nlohmann::json manifest;
        manifest["tool"] = "rcm_lab";
        manifest["version"] = kToolVersion;
        manifest["config"] = cfg.to_json();
        std::vector<std::string> names;
        for (const auto& [name, content] : files) names.push_back(name);
        names.push_back("manifest.json");
        names.push_back("summary.txt");
        manifest["outputs"] = names;

        for (const auto& [name, content] : files) {
            const std::string path = (fs::path(cfg.out_dir) / name).string();
            write_text_atomic(path, content);
            written.push_back(path);
        }
        const std::string mpath = (fs::path(cfg.out_dir) / "manifest.json").string();
        write_text_atomic(mpath, manifest.dump(2) + "\n");
        written.push_back(mpath);
        const std::string spath = (fs::path(cfg.out_dir) / "summary.txt").string();
        write_text_atomic(spath, summary.str());
        written.push_back(spath);
        return written;
    }
};

void add_estimate_row(CsvWriter& w, const Estimate& e) {
    w.add(e.value);
    w.add(e.stderr_);
    w.add(e.ci_lo);
    w.add(e.ci_hi);
    w.add(e.n);
}

double get_num(const nlohmann::json& p, const char* key) { return p.at(key).get<double>(); }
std::uint64_t get_u64(const nlohmann::json& p, const char* key) {
    return p.at(key).get<std::uint64_t>();
}

std::vector<double> get_nums(const nlohmann::json& p, const char* key) {
    return p.at(key).get<std::vector<double>>();
}
std::vector<int> get_ints(const nlohmann::json& p, const char* key) {
    return p.at(key).get<std::vector<int>>();
}

// ---- subcommand bodies ----------------------------------------------------

int run_sample(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const double lambda = get_num(cfg.params, "lambda");
    const double L = get_num(cfg.params, "L");
    const bool with_root = cfg.params.value("with_root", true);

    PointSample sample =
        sample_poisson(lambda, Box::cube(L, g.dim()), derive_seed(cfg.seed, "eta"));
    if (with_root)
        sample = add_root(sample, std::vector<double>(static_cast<std::size_t>(g.dim()), 0.0));

    BuildStrategy strategy =
        g.bounded_support() ? BuildStrategy::cell_list : BuildStrategy::dense;
    if (cfg.params.contains("strategy")) {
        const std::string s = cfg.params["strategy"].get<std::string>();
        if (s == "dense")
            strategy = BuildStrategy::dense;
        else if (s == "cell-list")
            strategy = BuildStrategy::cell_list;
        else
            throw ConfigError({"strategy: must be 'dense' or 'cell-list'"});
    }
    PairUniformSource src(derive_seed(cfg.seed, "pairs"));
    const RcmGraph graph = build_graph(sample, g, src, strategy);

    std::vector<std::uint8_t> site_bits, ghost_bits;
    const std::vector<std::uint8_t>* site_ptr = nullptr;
    const std::vector<std::uint8_t>* ghost_ptr = nullptr;
    if (cfg.params.contains("site_p")) {
        const double p = cfg.params["site_p"].get<double>();
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError({"site_p: outside [0,1]"});
        if (!with_root) throw ConfigError({"site_p: requires with_root"});
        site_bits = sample_site_config(graph, sample.root_id(), p,
                                       derive_seed(cfg.seed, "sites"))
                        .open;
        site_ptr = &site_bits;
    }
    if (cfg.params.contains("ghost_h")) {
        const double h = cfg.params["ghost_h"].get<double>();
        if (!(h >= 0.0)) throw ConfigError({"ghost_h: must be >= 0"});
        ghost_bits = sample_ghost(sample.size(), h, derive_seed(cfg.seed, "ghost")).green;
        ghost_ptr = &ghost_bits;
    }

    CsvWriter pw;
    {
        std::vector<std::string> header{"id"};
        for (int a = 1; a <= sample.dim(); ++a) header.push_back("x" + std::to_string(a));
        if (site_ptr) header.push_back("site");
        if (ghost_ptr) header.push_back("ghost");
        pw.set_header(header);
        for (std::uint32_t i = 0; i < sample.size(); ++i) {
            pw.begin_row();
            pw.add(i);
            for (double c : sample.position(i)) pw.add(c);
            if (site_ptr) pw.add(static_cast<std::uint64_t>((*site_ptr)[i]));
            if (ghost_ptr) pw.add(static_cast<std::uint64_t>((*ghost_ptr)[i]));
        }
    }
    out.add_csv("points.csv", pw);

    CsvWriter ew;
    ew.set_header({"id_a", "id_b"});
    for (std::uint32_t i = 0; i < graph.n; ++i)
        for (std::uint32_t j : graph.adj[i])
            if (i < j) {
                ew.begin_row();
                ew.add(i);
                ew.add(j);
            }
    out.add_csv("edges.csv", ew);

    out.summary << "sample: n=" << sample.size() << " edges=" << graph.edge_count()
                << " g=" << g.tag() << "\n";
    return 0;
}

int run_estimate_psi(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const int n_min = cfg.params.value("n_min", 1);
    const int n_max = cfg.params.at("n_max").get<int>();
    if (n_min < 1 || n_max < n_min) throw ConfigError({"n_min/n_max: need 1 <= n_min <= n_max"});
    std::vector<int> ns;
    for (int n = n_min; n <= n_max; ++n) ns.push_back(n);
    const auto psis =
        est::estimate_psi(g, get_num(cfg.params, "lambda"), ns, get_num(cfg.params, "L"),
                          get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);
    CsvWriter w;
    w.set_header({"n", "value", "stderr", "ci_lo", "ci_hi", "reps"});
    for (const auto& [n, e] : psis) {
        w.begin_row();
        w.add(n);
        add_estimate_row(w, e);
    }
    out.add_csv("results.csv", w);
    out.summary << "estimate-psi: n in [" << n_min << "," << n_max << "], psi(" << n_min
                << ")=" << psis.at(n_min).value << ", psi(" << n_max
                << ")=" << psis.at(n_max).value << "\n";
    return 0;
}

int run_estimate_mh(const ExperimentConfig& cfg, OutputBundle& out, bool hat) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const double lambda = get_num(cfg.params, "lambda");
    const double h = get_num(cfg.params, "h");
    if (h < 0.0) throw ConfigError({"h: must be >= 0"});
    Estimate e;
    if (hat) {
        e = est::estimate_mhat(g, lambda, h, get_num(cfg.params, "K"),
                               get_num(cfg.params, "s"), get_u64(cfg.params, "reps"),
                               cfg.seed, cfg.threads);
    } else {
        e = est::estimate_mh(g, lambda, h, get_num(cfg.params, "L"),
                             get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);
    }
    CsvWriter w;
    w.set_header({"lambda", "h", "value", "stderr", "ci_lo", "ci_hi", "reps"});
    w.begin_row();
    w.add(lambda);
    w.add(h);
    add_estimate_row(w, e);
    out.add_csv("results.csv", w);
    out.summary << (hat ? "estimate-mhat: " : "estimate-mh: ") << e.value << " ["
                << e.ci_lo << ", " << e.ci_hi << "]\n";
    return 0;
}

int run_coupling_test(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const auto s_values = get_nums(cfg.params, "s_values");
    if (s_values.empty()) throw ConfigError({"s_values: must be non-empty"});
    const auto estimates = est::estimate_coupling_disagreement(
        g, get_num(cfg.params, "lambda"), get_num(cfg.params, "K"), s_values,
        get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);

    CsvWriter w;
    w.set_header({"s", "value", "stderr", "ci_lo", "ci_hi", "reps"});
    std::vector<double> xs, ys, vars;
    for (double s : s_values) {
        const Estimate& e = estimates.at(s);
        w.begin_row();
        w.add(s);
        add_estimate_row(w, e);
        xs.push_back(s);
        ys.push_back(e.value);
        // Wilson width keeps a usable weight when the count is 0.
        const double se = std::max(e.stderr_, (e.ci_hi - e.ci_lo) / 4.0);
        vars.push_back(se * se);
    }
    out.add_csv("results.csv", w);

    const LineFit fit = fit_line_wls(xs, ys, vars);
    CsvWriter fw;
    fw.set_header({"slope", "slope_stderr", "intercept", "intercept_stderr",
                   "intercept_ci_lo", "intercept_ci_hi"});
    fw.begin_row();
    fw.add(fit.slope);
    fw.add(fit.slope_stderr);
    fw.add(fit.intercept);
    fw.add(fit.intercept_stderr);
    fw.add(fit.intercept - 1.959963984540054 * fit.intercept_stderr);
    fw.add(fit.intercept + 1.959963984540054 * fit.intercept_stderr);
    out.add_csv("fit.csv", fw);

    out.summary << "coupling-test: slope=" << fit.slope << " intercept=" << fit.intercept
                << " +- " << fit.intercept_stderr << "\n";
    return 0;
}

int run_cutoff_test(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const auto r_values = get_nums(cfg.params, "r_values");
    const auto k_values = get_ints(cfg.params, "k_values");
    const double lambda = get_num(cfg.params, "lambda");
    const auto estimates = est::estimate_cutoff_discrepancy(
        g, lambda, r_values, k_values, get_num(cfg.params, "L"),
        get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);

    const double total = integral(g);
    CsvWriter w;
    w.set_header({"R", "k", "value", "stderr", "ci_lo", "ci_hi", "reps", "tail_bound"});
    for (double r : r_values)
        for (int k : k_values) {
            const Estimate& e = estimates.at({r, k});
            w.begin_row();
            w.add(r);
            w.add(k);
            add_estimate_row(w, e);
            w.add(lambda * (total - integral(cutoff(g, r))));
        }
    out.add_csv("results.csv", w);
    out.summary << "cutoff-test: " << r_values.size() << " radii, " << k_values.size()
                << " cluster sizes\n";
    return 0;
}

int run_verify_theorem2(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const double h = get_num(cfg.params, "h");
    if (h < 0.0) throw ConfigError({"h: must be >= 0"});
    const auto report = est::verify_theorem2(
        g, get_num(cfg.params, "lambda"), h, cfg.params.at("n_max").get<int>(),
        get_num(cfg.params, "L"), get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);

    CsvWriter w;
    w.set_header({"n", "lhs", "lhs_se", "rhs", "rhs_se", "margin_sigma"});
    for (const auto& row : report.rows) {
        w.begin_row();
        w.add(row.n);
        w.add(row.lhs);
        w.add(row.lhs_se);
        w.add(row.rhs);
        w.add(row.rhs_se);
        w.add(row.margin_sigma);
    }
    out.add_csv("results.csv", w);

    CsvWriter mw;
    mw.set_header({"m_h", "m_h_stderr", "m_h_ci_lo", "m_h_ci_hi", "lambda_prime",
                   "inconclusive"});
    mw.begin_row();
    mw.add(report.m_h.value);
    mw.add(report.m_h.stderr_);
    mw.add(report.m_h.ci_lo);
    mw.add(report.m_h.ci_hi);
    mw.add(report.lambda_prime);
    mw.add(static_cast<std::uint64_t>(report.inconclusive ? 1 : 0));
    out.add_csv("mh.csv", mw);

    out.summary << "verify-theorem2: m_h=" << report.m_h.value
                << " lambda'=" << report.lambda_prime
                << (report.inconclusive ? " INCONCLUSIVE"
                                        : (report.holds ? " HOLDS" : " VIOLATED"))
                << "\n";
    if (report.inconclusive) return 1;
    return report.holds ? 0 : 1;
}

int run_fit_decay(const ExperimentConfig& cfg, OutputBundle& out) {
    const CsvTable t = read_csv(cfg.params.at("input_csv").get<std::string>());
    const std::size_t nc = t.column("n");
    const std::size_t vc = t.column("value");
    const std::size_t sc = t.column("stderr");
    const std::size_t rc = t.column("reps");
    const int n_lo = cfg.params.value("n_lo", 1);
    const int n_hi = cfg.params.value("n_hi", INT32_MAX);
    const double min_count = cfg.params.value("min_count", 10.0);

    std::map<int, Estimate> points;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const int n = static_cast<int>(t.number(r, nc));
        if (n < n_lo || n > n_hi) continue;
        Estimate e;
        e.value = t.number(r, vc);
        e.stderr_ = t.number(r, sc);
        e.n = static_cast<std::uint64_t>(t.number(r, rc));
        if (e.value * static_cast<double>(e.n) <= min_count) continue;
        points[n] = e;
    }
    const DecayFit fit = fit_decay(points);

    CsvWriter w;
    w.set_header({"c", "C", "r_squared", "c_stderr", "c_ci_lo", "c_ci_hi", "n_points",
                  "n_lo", "n_hi"});
    w.begin_row();
    w.add(fit.rate);
    w.add(fit.prefactor);
    w.add(fit.r_squared);
    w.add(fit.rate_stderr);
    w.add(fit.rate - 1.959963984540054 * fit.rate_stderr);
    w.add(fit.rate + 1.959963984540054 * fit.rate_stderr);
    w.add(static_cast<std::uint64_t>(fit.n_points));
    w.add(fit.n_lo);
    w.add(fit.n_hi);
    out.add_csv("results.csv", w);
    out.summary << "fit-decay: c=" << fit.rate << " C=" << fit.prefactor
                << " R2=" << fit.r_squared << " over n in [" << fit.n_lo << ","
                << fit.n_hi << "]\n";
    return 0;
}

int run_transitivity(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const double h = get_num(cfg.params, "h");
    if (h < 0.0) throw ConfigError({"h: must be >= 0"});
    const auto report = est::transitivity_experiment(
        g, get_num(cfg.params, "lambda"), h, get_num(cfg.params, "K"),
        get_ints(cfg.params, "n_factors"), get_u64(cfg.params, "outer_reps"),
        get_u64(cfg.params, "inner_reps"), cfg.seed, cfg.threads,
        static_cast<std::uint32_t>(cfg.params.value("subsample_max", 200)),
        cfg.params.value("reference_reps", static_cast<std::uint64_t>(200000)));

    CsvWriter w;
    w.set_header({"N", "median_max", "q1_max", "q3_max", "mean_max", "outer_reps",
                  "mh_ref", "mh_ref_se"});
    for (const auto& row : report.rows) {
        w.begin_row();
        w.add(row.n_factor);
        w.add(row.median_max);
        w.add(row.q1_max);
        w.add(row.q3_max);
        w.add(row.mean_max);
        w.add(static_cast<std::uint64_t>(row.max_stats.size()));
        w.add(report.m_h_reference.value);
        w.add(report.m_h_reference.stderr_);
    }
    out.add_csv("results.csv", w);

    CsvWriter raw;
    raw.set_header({"N", "rep", "value"});
    for (const auto& row : report.rows)
        for (std::size_t r = 0; r < row.max_stats.size(); ++r) {
            raw.begin_row();
            raw.add(row.n_factor);
            raw.add(static_cast<std::uint64_t>(r));
            raw.add(row.max_stats[r]);
        }
    out.add_csv("raw.csv", raw);

    out.summary << "transitivity-test: m_h_ref=" << report.m_h_reference.value << ";";
    for (const auto& row : report.rows)
        out.summary << " median(N=" << row.n_factor << ")=" << row.median_max;
    out.summary << "\n";
    return 0;
}

int run_r_event(const ExperimentConfig& cfg, OutputBundle& out) {
    const double alpha = get_num(cfg.params, "alpha");
    const auto rows = est::r_event_frequency(
        get_num(cfg.params, "lambda"), get_num(cfg.params, "K"),
        get_num(cfg.params, "s"), alpha, get_ints(cfg.params, "n_factors"),
        get_u64(cfg.params, "reps"), cfg.seed, cfg.params.at("dim").get<int>(),
        cfg.threads);
    CsvWriter w;
    w.set_header({"N", "value", "stderr", "ci_lo", "ci_hi", "reps", "bound"});
    for (const auto& row : rows) {
        w.begin_row();
        w.add(row.n_factor);
        add_estimate_row(w, row.frequency);
        w.add(row.bound);
    }
    out.add_csv("results.csv", w);
    out.summary << "r-event-test: " << rows.size() << " N values, alpha=" << alpha
                << "\n";
    return 0;
}

int run_mecke(const ExperimentConfig& cfg, OutputBundle& out) {
    const auto g = connection_from_json(cfg.params.at("g"));
    const auto report =
        est::mecke_edge_check(g, get_num(cfg.params, "lambda"), get_num(cfg.params, "L"),
                              get_u64(cfg.params, "reps"), cfg.seed, cfg.threads);
    CsvWriter w;
    w.set_header({"empirical_mean", "empirical_se", "reference", "z", "reps"});
    w.begin_row();
    w.add(report.empirical_mean);
    w.add(report.empirical_se);
    w.add(report.reference);
    w.add(report.z);
    w.add(report.reps);
    out.add_csv("results.csv", w);
    out.summary << "mecke-check: empirical=" << report.empirical_mean
                << " reference=" << report.reference << " z=" << report.z << "\n";
    return 0;
}

std::string edge_list_string(const RcmGraph& g) {
    std::string s;
    for (std::uint32_t i = 0; i < g.n; ++i)
        for (std::uint32_t j : g.adj[i])
            if (i < j) {
                if (!s.empty()) s += ';';
                s += std::to_string(i) + "-" + std::to_string(j);
            }
    return s;
}

int run_verify_pivotal(const ExperimentConfig& cfg, OutputBundle& out) {
    const int max_nonroot = cfg.params.value("max_nonroot", 4);
    if (max_nonroot < 0 || max_nonroot > 4)
        throw ConfigError({"max_nonroot: must lie in [0, 4]"});
    std::vector<double> p_values{0.3, 0.6};
    std::vector<double> h_values{0.2, 1.0};
    if (cfg.params.contains("p_values")) p_values = get_nums(cfg.params, "p_values");
    if (cfg.params.contains("h_values")) h_values = get_nums(cfg.params, "h_values");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError({"p_values: outside [0,1]"});
    for (double h : h_values)
        if (!(h >= 0.0)) throw ConfigError({"h_values: must be >= 0"});

    const auto graphs = exact::enumerate_rooted_graphs(max_nonroot);
    CsvWriter w;
    w.set_header({"graph", "n_nonroot", "p", "h", "epsilon", "p_event", "dominates",
                  "vacuous"});
    nlohmann::json reports = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& graph : graphs) {
        for (double p : p_values)
            for (double h : h_values) {
                const auto report = exact::verify_lemma_pivotal(graph, 0, p, h);
                const bool pass = report.vacuous || report.dominates;
                all_pass = all_pass && pass;
                const std::string instance =
                    graph.n == 1 ? std::string("isolated-root") : edge_list_string(graph);
                w.begin_row();
                w.add(instance);
                w.add(static_cast<std::uint64_t>(graph.n - 1));
                w.add(p);
                w.add(h);
                w.add(report.epsilon);
                w.add(report.p_event);
                w.add(static_cast<std::uint64_t>(report.dominates ? 1 : 0));
                w.add(static_cast<std::uint64_t>(report.vacuous ? 1 : 0));
                nlohmann::json rec = {{"instance", instance},
                                      {"parameters", {{"p", p}, {"h", h}}},
                                      {"epsilon", report.epsilon},
                                      {"pass", pass}};
                if (report.witness_upset) rec["witness"] = *report.witness_upset;
                reports.push_back(rec);
            }
    }
    out.add_csv("results.csv", w);
    out.files.emplace_back("reports.json", reports.dump(2) + "\n");
    out.summary << "verify-pivotal: " << graphs.size() << " graphs, "
                << (all_pass ? "all dominations hold" : "VIOLATION FOUND") << "\n";
    return all_pass ? 0 : 1;
}

int run_domination_check(const ExperimentConfig& cfg, OutputBundle& out) {
    CsvWriter w;
    w.set_header({"case", "m", "dominates", "worst_gap", "witness_upset"});
    bool ok = true;
    auto record = [&](const std::string& name, const exact::FiniteMeasure& mu,
                      const exact::FiniteMeasure& nu, bool expect) {
        const auto r = exact::stochastic_dominates(mu, nu);
        ok = ok && (r.dominates == expect);
        w.begin_row();
        w.add(name);
        w.add(static_cast<std::uint64_t>(mu.m));
        w.add(static_cast<std::uint64_t>(r.dominates ? 1 : 0));
        w.add(r.worst_gap);
        w.add(r.witness_upset ? std::to_string(*r.witness_upset) : std::string("-"));
    };

    if (cfg.params.contains("mu") || cfg.params.contains("nu")) {
        if (!cfg.params.contains("mu") || !cfg.params.contains("nu") ||
            !cfg.params.contains("m"))
            throw ConfigError({"domination-check: need m, mu and nu together"});
        exact::FiniteMeasure mu, nu;
        mu.m = nu.m = cfg.params.at("m").get<int>();
        mu.prob = cfg.params.at("mu").get<std::vector<double>>();
        nu.prob = cfg.params.at("nu").get<std::vector<double>>();
        mu.validate();
        nu.validate();
        const auto r = exact::stochastic_dominates(mu, nu);
        w.begin_row();
        w.add(std::string("user"));
        w.add(static_cast<std::uint64_t>(mu.m));
        w.add(static_cast<std::uint64_t>(r.dominates ? 1 : 0));
        w.add(r.worst_gap);
        w.add(r.witness_upset ? std::to_string(*r.witness_upset) : std::string("-"));
        out.add_csv("results.csv", w);
        out.summary << "domination-check: user measures, dominates="
                    << (r.dominates ? "yes" : "no") << "\n";
        return r.dominates ? 0 : 1;
    }

    // Built-in suite: ordered product measures dominate, crossed point
    // masses do not, and every measure dominates itself.
    for (int m = 1; m <= 4; ++m) {
        record("product(0.2)<=product(0.5) m=" + std::to_string(m),
               exact::FiniteMeasure::product_bernoulli(m, 0.2),
               exact::FiniteMeasure::product_bernoulli(m, 0.5), true);
        record("self m=" + std::to_string(m),
               exact::FiniteMeasure::product_bernoulli(m, 0.35),
               exact::FiniteMeasure::product_bernoulli(m, 0.35), true);
        record("product(0.6)!<=product(0.3) m=" + std::to_string(m),
               exact::FiniteMeasure::product_bernoulli(m, 0.6),
               exact::FiniteMeasure::product_bernoulli(m, 0.3), false);
    }
    record("delta(10)!<=delta(01)", exact::FiniteMeasure::point_mass(2, 0b01),
           exact::FiniteMeasure::point_mass(2, 0b10), false);
    out.add_csv("results.csv", w);
    out.summary << "domination-check: built-in suite "
                << (ok ? "passed" : "FAILED") << "\n";
    return ok ? 0 : 1;
}

int run_lecam_table(const ExperimentConfig& cfg, OutputBundle& out) {
    const int n_max = cfg.params.value("n_max", 50);
    const double p_step = cfg.params.value("p_step", 0.01);
    const double p_max = cfg.params.value("p_max", 0.5);
    if (n_max < 1 || !(p_step > 0.0) || !(p_max <= 1.0))
        throw ConfigError({"lecam-table: bad grid"});

    CsvWriter w;
    w.set_header({"n", "p", "tv", "bound_9p"});
    bool ok = true;
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        for (int i = 1;; ++i) {
            const double p = i * p_step;
            if (p > p_max + 1e-12) break;
            const double tv = exact::tv_binomial_poisson(n, p);
            ok = ok && tv <= 9.0 * p;
            worst = std::max(worst, tv / p);
            w.begin_row();
            w.add(n);
            w.add(p);
            w.add(tv);
            w.add(9.0 * p);
        }
    }
    out.add_csv("results.csv", w);
    out.summary << "lecam-table: max TV/p = " << worst << ", bound 9 "
                << (ok ? "holds" : "VIOLATED") << "\n";
    return ok ? 0 : 1;
}

int run_cramer_check(const ExperimentConfig& cfg, OutputBundle& out) {
    const int grid = cfg.params.value("grid_points", 1000);
    const double alpha_max = cfg.params.value("alpha_max", 0.5);
    if (grid < 1 || !(alpha_max <= 0.5)) throw ConfigError({"cramer-check: bad grid"});
    CsvWriter w;
    w.set_header({"alpha", "upper_lhs", "upper_rhs", "lower_lhs", "lower_rhs"});
    bool ok = true;
    for (int i = 1; i < grid; ++i) {
        const double a = alpha_max * static_cast<double>(i) / static_cast<double>(grid);
        const double upper = (1.0 + a) * std::log1p(a) - a;
        const double lower = a + (1.0 - a) * std::log1p(-a);
        ok = ok && exact::cramer_rate_check({a});
        w.begin_row();
        w.add(a);
        w.add(upper);
        w.add(a * a / 4.0);
        w.add(lower);
        w.add(a * a / 12.0);
    }
    out.add_csv("results.csv", w);
    out.summary << "cramer-check: " << (grid - 1) << " grid points, "
                << (ok ? "both inequalities hold" : "VIOLATED") << "\n";
    return ok ? 0 : 1;
}

int run_g2_oracle(const ExperimentConfig& cfg, OutputBundle& out) {
    const std::uint64_t mc_reps = get_u64(cfg.params, "mc_reps");
    if (mc_reps < 100) throw ConfigError({"mc_reps: must be >= 100"});

    struct Case {
        std::string name;
        std::vector<std::vector<double>> points;
        ConnectionFunction g;
    };
    std::vector<Case> cases;

    if (cfg.params.contains("points")) {
        if (!cfg.params.contains("g"))
            throw ConfigError({"g: required with explicit points"});
        const auto g = connection_from_json(cfg.params.at("g"));
        std::vector<std::vector<double>> pts;
        for (const auto& row : cfg.params.at("points"))
            pts.push_back(row.get<std::vector<double>>());
        cases.push_back({"explicit", pts, g});
    } else {
        // Random configurations per family, points uniform in a cube.
        const int k = cfg.params.value("k", 4);
        const int dim = cfg.params.value("dim", 2);
        const std::uint64_t n_configs = cfg.params.value("n_configs", 20ull);
        const double side = cfg.params.value("box_side", 3.0);
        std::vector<std::string> families{"indicator", "exponential", "power-law"};
        if (cfg.params.contains("families"))
            families = cfg.params.at("families").get<std::vector<std::string>>();
        for (const auto& fam : families) {
            ConnectionFunction g = fam == "indicator"
                                       ? ConnectionFunction::indicator(1.0, dim)
                                   : fam == "exponential"
                                       ? ConnectionFunction::exponential(1.0, dim)
                                       : ConnectionFunction::power_law(dim + 1.0, dim);
            if (fam != "indicator" && fam != "exponential" && fam != "power-law")
                throw ConfigError({"families: unknown family '" + fam + "'"});
            for (std::uint64_t c = 0; c < n_configs; ++c) {
                Stream stream(derive_seed(derive_seed(cfg.seed, fam), "g2-points", c));
                std::vector<std::vector<double>> pts;
                for (int i = 0; i < k; ++i) {
                    std::vector<double> x(static_cast<std::size_t>(dim));
                    for (auto& v : x) v = stream.next_in(-side / 2.0, side / 2.0);
                    pts.push_back(std::move(x));
                }
                cases.push_back({fam + "#" + std::to_string(c), pts, g});
            }
        }
    }

    CsvWriter w;
    w.set_header({"case", "exact", "mc", "mc_se", "z", "reps"});
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& c = cases[ci];
        const double exact_p = exact::g2_exact(c.points, c.g);
        // Monte Carlo: draw the pairwise edges and test connectivity.
        const int k = static_cast<int>(c.points.size());
        std::vector<double> pe;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                pe.push_back(c.g.profile(distance(c.points[static_cast<std::size_t>(i)],
                                                  c.points[static_cast<std::size_t>(j)])));
        Stream stream(derive_seed(cfg.seed, "g2-mc", ci));
        std::uint64_t hits = 0;
        for (std::uint64_t rep = 0; rep < mc_reps; ++rep) {
            std::uint32_t mask = 0;
            for (std::size_t e = 0; e < pe.size(); ++e)
                if (stream.next_unit() < pe[e]) mask |= 1u << e;
            // Same connectivity routine the oracle uses would defeat the
            // cross-check; walk components directly.
            std::uint32_t reach = 1u;
            bool grew = true;
            while (grew) {
                grew = false;
                std::size_t e = 0;
                for (int i = 0; i < k; ++i)
                    for (int j = i + 1; j < k; ++j, ++e) {
                        if (!((mask >> e) & 1u)) continue;
                        const bool ri = (reach >> i) & 1u, rj = (reach >> j) & 1u;
                        if (ri != rj) {
                            reach |= (1u << i) | (1u << j);
                            grew = true;
                        }
                    }
            }
            if (reach == (1u << k) - 1u) ++hits;
        }
        const Estimate mc = Estimate::proportion(hits, mc_reps);
        const double z = mc.stderr_ > 0.0
                             ? (mc.value - exact_p) / mc.stderr_
                             : (mc.value == exact_p ? 0.0 : 1e9);
        w.begin_row();
        w.add(c.name);
        w.add(exact_p);
        w.add(mc.value);
        w.add(mc.stderr_);
        w.add(z);
        w.add(mc_reps);
    }
    out.add_csv("results.csv", w);
    out.summary << "g2-oracle: " << cases.size() << " configurations\n";
    return 0;
}

int run_plot_data(const ExperimentConfig& cfg, OutputBundle& out) {
    const std::string kind = cfg.params.at("kind").get<std::string>();
    if (kind != "decay" && kind != "trend")
        throw ConfigError({"kind: must be 'decay' or 'trend'"});
    const std::string input = cfg.params.at("input_csv").get<std::string>();
    const std::string out_path =
        (fs::path(cfg.out_dir) / ("plot_" + kind + ".csv")).string();
    fs::create_directories(cfg.out_dir);
    emit_plot_data(input, kind, out_path);
    out.summary << "plot-data: wrote " << out_path << "\n";
    return 0;
}

}  // namespace

void emit_plot_data(const std::string& input_csv, const std::string& kind,
                    const std::string& out_path) {
    const CsvTable t = read_csv(input_csv);
    if (t.rows.empty()) throw std::runtime_error(input_csv + ": no data rows");
    CsvWriter w;
    if (kind == "decay") {
        const std::size_t nc = t.column("n");
        const std::size_t vc = t.column("value");
        const std::size_t lc = t.column("ci_lo");
        const std::size_t hc = t.column("ci_hi");
        w.set_header({"n", "log_value", "log_ci_lo", "log_ci_hi"});
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const double v = t.number(r, vc);
            if (!(v > 0.0)) continue;  // log-plot drops exact zeros
            const double lo = t.number(r, lc);
            const double hi = t.number(r, hc);
            w.begin_row();
            w.add(static_cast<std::uint64_t>(t.number(r, nc)));
            w.add(std::log(v));
            w.add(lo > 0.0 ? std::log(lo) : std::log(v) - 10.0);
            w.add(std::log(hi));
        }
    } else if (kind == "trend") {
        const std::size_t nc = t.column("N");
        const std::size_t vc = t.column("value");
        std::map<int, std::vector<double>> groups;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            groups[static_cast<int>(t.number(r, nc))].push_back(t.number(r, vc));
        w.set_header({"N", "median", "q1", "q3", "count"});
        for (auto& [n, vals] : groups) {
            std::sort(vals.begin(), vals.end());
            auto quant = [&](double q) {
                const double pos = q * (static_cast<double>(vals.size()) - 1.0);
                const std::size_t i = static_cast<std::size_t>(pos);
                if (i + 1 >= vals.size()) return vals.back();
                return vals[i] * (1.0 - (pos - i)) + vals[i + 1] * (pos - i);
            };
            w.begin_row();
            w.add(n);
            w.add(quant(0.5));
            w.add(quant(0.25));
            w.add(quant(0.75));
            w.add(static_cast<std::uint64_t>(vals.size()));
        }
    } else {
        throw std::runtime_error("emit_plot_data: unknown kind " + kind);
    }
    w.write_atomic(out_path);
}

RunResult run(const ExperimentConfig& cfg) {
    OutputBundle out(cfg);
    int code = 0;
    if (cfg.subcommand == "sample") code = run_sample(cfg, out);
    else if (cfg.subcommand == "estimate-psi") code = run_estimate_psi(cfg, out);
    else if (cfg.subcommand == "estimate-mh") code = run_estimate_mh(cfg, out, false);
    else if (cfg.subcommand == "estimate-mhat") code = run_estimate_mh(cfg, out, true);
    else if (cfg.subcommand == "coupling-test") code = run_coupling_test(cfg, out);
    else if (cfg.subcommand == "cutoff-test") code = run_cutoff_test(cfg, out);
    else if (cfg.subcommand == "verify-theorem2") code = run_verify_theorem2(cfg, out);
    else if (cfg.subcommand == "fit-decay") code = run_fit_decay(cfg, out);
    else if (cfg.subcommand == "transitivity-test") code = run_transitivity(cfg, out);
    else if (cfg.subcommand == "r-event-test") code = run_r_event(cfg, out);
    else if (cfg.subcommand == "mecke-check") code = run_mecke(cfg, out);
    else if (cfg.subcommand == "verify-pivotal") code = run_verify_pivotal(cfg, out);
    else if (cfg.subcommand == "domination-check") code = run_domination_check(cfg, out);
    else if (cfg.subcommand == "lecam-table") code = run_lecam_table(cfg, out);
    else if (cfg.subcommand == "cramer-check") code = run_cramer_check(cfg, out);
    else if (cfg.subcommand == "g2-oracle") code = run_g2_oracle(cfg, out);
    else if (cfg.subcommand == "plot-data") code = run_plot_data(cfg, out);
    else throw ConfigError({"subcommand: unknown '" + cfg.subcommand + "'"});

    RunResult result;
    result.exit_code = code;
    result.summary = out.summary.str();
    result.written_files = out.flush();
    return result;
}

}  // namespace rcm::cli
