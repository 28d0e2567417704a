#include "rcm/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "rcm/cell_grid.hpp"
#include "rcm/exact.hpp"
#include "rcm/percolation.hpp"
#include "rcm/quadrature.hpp"
#include "rcm/rng.hpp"

namespace rcm::est {

namespace {

// Run body(i) for i in [0, n), chunked over worker threads. Bodies write to
// disjoint index slots, so scheduling cannot affect results.
void parallel_for(std::uint64_t n, unsigned threads,
                  const std::function<void(std::uint64_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned t = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, n));
    const std::uint64_t chunk = std::max<std::uint64_t>(1, n / (8ull * t));
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try {
            while (true) {
                const std::uint64_t begin = cursor.fetch_add(chunk);
                if (begin >= n) return;
                const std::uint64_t end = std::min(n, begin + chunk);
                for (std::uint64_t i = begin; i < end; ++i) body(i);
            }
        } catch (...) {
            std::scoped_lock lk(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> origin(int dim) {
    return std::vector<double>(static_cast<std::size_t>(dim), 0.0);
}

// Desk-scale budgets from the sampler contract: dense pair scans up to
// ~2e4 points per replication, cell lists up to ~1e6.
void check_points_budget(const ConnectionFunction& g, double total_intensity,
                         double window_side, int dim) {
    double expected = total_intensity;
    for (int a = 0; a < dim; ++a) expected *= window_side;
    const double limit = g.bounded_support() ? 1e6 : 2e4;
    if (expected > limit)
        throw std::invalid_argument(
            "estimator: expected points per replication exceed the budget");
}

struct ExploreResult {
    std::vector<std::uint32_t> vertices;
    bool censored = false;

    std::uint32_t size() const { return static_cast<std::uint32_t>(vertices.size()); }
};

// Lazy root-cluster BFS against keyed pair uniforms. `open` (optional)
// filters which points may join; the root joins unconditionally. Halts once
// `cap` vertices are found.
ExploreResult lazy_cluster(const PointSample& sample, const ConnectionFunction& g,
                           const PairUniformSource& src, std::uint32_t root,
                           std::uint32_t cap, const std::uint8_t* open = nullptr) {
    const std::uint32_t n = sample.size();
    std::optional<CellGrid> grid;
    if (g.bounded_support()) grid.emplace(sample, g.support_radius());

    ExploreResult r;
    std::vector<std::uint8_t> seen(n, 0);
    seen[root] = 1;
    r.vertices.push_back(root);
    std::size_t head = 0;

    auto try_join = [&](std::uint32_t v, std::uint32_t w) -> bool {  // true = halt
        if (seen[w]) return false;
        if (open && !open[w]) return false;
        const double t = g.profile(distance(sample.position(v), sample.position(w)));
        if (t <= 0.0 || src.by_ids(v, w) >= t) return false;
        if (r.vertices.size() == cap) {
            r.censored = true;
            return true;
        }
        seen[w] = 1;
        r.vertices.push_back(w);
        return false;
    };

    while (head < r.vertices.size()) {
        const std::uint32_t v = r.vertices[head++];
        bool halted = false;
        if (grid) {
            grid->for_neighbors(grid->cell_of(sample.position(v)), [&](std::size_t c) {
                if (halted) return;
                for (std::uint32_t w : grid->cells[c]) {
                    if (w == v) continue;
                    if (try_join(v, w)) {
                        halted = true;
                        return;
                    }
                }
            });
        } else {
            for (std::uint32_t w = 0; w < n && !halted; ++w)
                if (w != v) halted = try_join(v, w);
        }
        if (halted) return r;
    }
    return r;
}

PointSample rooted_sample(double lambda, double window_side, int dim,
                          std::uint64_t seed) {
    PointSample eta = sample_poisson(lambda, Box::cube(window_side, dim),
                                     derive_seed(seed, "eta"));
    return add_root(eta, origin(dim));
}

void require_reps(std::uint64_t reps) {
    if (reps < 100) throw std::invalid_argument("estimator: reps must be >= 100");
}

}  // namespace

std::map<int, Estimate> estimate_psi(const ConnectionFunction& g, double lambda,
                                     const std::vector<int>& n_values,
                                     double window_side, std::uint64_t reps,
                                     std::uint64_t seed, unsigned threads) {
    require_reps(reps);
    if (!(lambda > 0.0) || !(window_side > 0.0))
        throw std::invalid_argument("estimate_psi: lambda and L must be > 0");
    if (n_values.empty()) throw std::invalid_argument("estimate_psi: no n values");
    for (int n : n_values)
        if (n < 1) throw std::invalid_argument("estimate_psi: n must be >= 1");
    check_points_budget(g, lambda, window_side, g.dim());
    const std::uint32_t cap =
        static_cast<std::uint32_t>(*std::max_element(n_values.begin(), n_values.end()));

    std::vector<std::uint32_t> sizes(reps);
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "psi-rep", rep);
        const PointSample sample = rooted_sample(lambda, window_side, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"));
        sizes[rep] = lazy_cluster(sample, g, src, sample.root_id(), cap).size();
    });

    std::map<int, Estimate> out;
    for (int n : n_values) {
        if (n == 1) {
            // The root is always present, so psi_1 is 1 by construction.
            out[1] = Estimate{1.0, 0.0, 1.0, 1.0, reps};
            continue;
        }
        std::uint64_t hits = 0;
        for (std::uint32_t s : sizes)
            if (s >= static_cast<std::uint32_t>(n)) ++hits;
        out[n] = Estimate::proportion(hits, reps);
    }
    return out;
}

Estimate estimate_mh(const ConnectionFunction& g, double lambda, double h,
                     double window_side, std::uint64_t reps, std::uint64_t seed,
                     unsigned threads) {
    require_reps(reps);
    if (!(lambda > 0.0) || !(window_side > 0.0) || !(h >= 0.0))
        throw std::invalid_argument("estimate_mh: bad lambda, L or h");
    check_points_budget(g, lambda, window_side, g.dim());

    std::vector<std::uint8_t> hit(reps, 0);
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "mh-rep", rep);
        const PointSample sample = rooted_sample(lambda, window_side, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"));
        const auto cluster =
            lazy_cluster(sample, g, src, sample.root_id(), sample.size());
        const GhostField ghost = sample_ghost(sample.size(), h, derive_seed(rs, "ghost"));
        for (std::uint32_t v : cluster.vertices)
            if (ghost.green[v]) {
                hit[rep] = 1;
                break;
            }
    });
    std::uint64_t hits = 0;
    for (auto b : hit) hits += b;
    return Estimate::proportion(hits, reps);
}

Estimate estimate_mhat(const ConnectionFunction& g, double lambda, double h, double K,
                       double s, std::uint64_t reps, std::uint64_t seed,
                       unsigned threads) {
    require_reps(reps);
    if (!(lambda > 0.0) || !(h >= 0.0))
        throw std::invalid_argument("estimate_mhat: bad lambda or h");
    const BoxLattice lat(K, s, g.dim());
    check_points_budget(g, lambda, K, g.dim());

    std::vector<std::uint8_t> hit(reps, 0);
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "mhat-rep", rep);
        const PointSample sample = rooted_sample(lambda, K, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"),
                              PairUniformSource::Keying::by_box_tensor);
        const auto labels = tensor_labels(sample, lat);
        const GhostField ghost = sample_ghost(sample.size(), h, derive_seed(rs, "ghost"));

        // BFS in the box-supremum graph; reach extends two box diagonals
        // beyond the support.
        const std::uint32_t n = sample.size();
        std::optional<CellGrid> grid;
        if (g.bounded_support())
            grid.emplace(sample, g.support_radius() +
                                     2.0 * std::sqrt(static_cast<double>(g.dim())) *
                                         lat.box_side());
        std::vector<std::uint8_t> seen(n, 0);
        std::vector<std::uint32_t> queue{sample.root_id()};
        seen[sample.root_id()] = 1;
        bool green_found = ghost.green[sample.root_id()];
        std::size_t head = 0;
        auto try_join = [&](std::uint32_t v, std::uint32_t w) {
            if (seen[w] || green_found) return;
            const double t = g_hat(g, lat, labels[v].first, labels[w].first);
            if (t <= 0.0) return;
            if (src.by_tensor(labels[v].first, labels[v].second, labels[w].first,
                              labels[w].second) >= t)
                return;
            seen[w] = 1;
            queue.push_back(w);
            if (ghost.green[w]) green_found = true;
        };
        while (head < queue.size() && !green_found) {
            const std::uint32_t v = queue[head++];
            if (grid) {
                grid->for_neighbors(grid->cell_of(sample.position(v)),
                                    [&](std::size_t c) {
                                        for (std::uint32_t w : grid->cells[c])
                                            if (w != v) try_join(v, w);
                                    });
            } else {
                for (std::uint32_t w = 0; w < n; ++w)
                    if (w != v) try_join(v, w);
            }
        }
        hit[rep] = green_found ? 1 : 0;
    });
    std::uint64_t hits = 0;
    for (auto b : hit) hits += b;
    return Estimate::proportion(hits, reps);
}

std::map<double, Estimate> estimate_coupling_disagreement(
    const ConnectionFunction& g, double lambda, double K,
    const std::vector<double>& s_values, std::uint64_t reps, std::uint64_t seed,
    unsigned threads) {
    require_reps(reps);
    if (!(lambda > 0.0)) throw std::invalid_argument("coupling: lambda must be > 0");
    if (s_values.empty()) throw std::invalid_argument("coupling: no s values");
    std::vector<BoxLattice> lattices;
    for (double s : s_values) lattices.emplace_back(K, s, g.dim());
    check_points_budget(g, lambda, K, g.dim());

    // One row of disagreement flags per replication (same sample and
    // uniforms across pitches).
    std::vector<std::vector<std::uint8_t>> flags(
        s_values.size(), std::vector<std::uint8_t>(reps, 0));
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "coupling-rep", rep);
        const PointSample sample = rooted_sample(lambda, K, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"),
                              PairUniformSource::Keying::by_box_tensor);
        const std::uint32_t n = sample.size();
        for (std::size_t si = 0; si < s_values.size(); ++si) {
            const auto labels = tensor_labels(sample, lattices[si]);
            bool differ = false;
            for (std::uint32_t i = 0; i < n && !differ; ++i)
                for (std::uint32_t j = i + 1; j < n && !differ; ++j) {
                    const double lo =
                        g.profile(distance(sample.position(i), sample.position(j)));
                    const double hi =
                        g_hat(g, lattices[si], labels[i].first, labels[j].first);
                    if (hi <= lo) continue;  // identical edge decision
                    const double u = src.by_tensor(labels[i].first, labels[i].second,
                                                   labels[j].first, labels[j].second);
                    if (u >= lo && u < hi) differ = true;
                }
            flags[si][rep] = differ ? 1 : 0;
        }
    });

    std::map<double, Estimate> out;
    for (std::size_t si = 0; si < s_values.size(); ++si) {
        std::uint64_t hits = 0;
        for (auto b : flags[si]) hits += b;
        out[s_values[si]] = Estimate::proportion(hits, reps);
    }
    return out;
}

std::map<std::pair<double, int>, Estimate> estimate_cutoff_discrepancy(
    const ConnectionFunction& g, double lambda, const std::vector<double>& r_values,
    const std::vector<int>& k_values, double window_side, std::uint64_t reps,
    std::uint64_t seed, unsigned threads) {
    require_reps(reps);
    if (g.bounded_support())
        throw std::invalid_argument("cutoff discrepancy: g must have unbounded support");
    if (r_values.empty() || k_values.empty())
        throw std::invalid_argument("cutoff discrepancy: empty R or k list");
    for (int k : k_values)
        if (k < 1) throw std::invalid_argument("cutoff discrepancy: k must be >= 1");
    check_points_budget(g, lambda, window_side, g.dim());
    const int max_k = *std::max_element(k_values.begin(), k_values.end());

    std::vector<ConnectionFunction> cut_functions;
    for (double r : r_values) cut_functions.push_back(cutoff(g, r));

    // success[r-index][k-index][rep]
    std::vector<std::vector<std::vector<std::uint8_t>>> success(
        r_values.size(), std::vector<std::vector<std::uint8_t>>(
                             k_values.size(), std::vector<std::uint8_t>(reps, 0)));

    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "cutoff-rep", rep);
        const PointSample sample = rooted_sample(lambda, window_side, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"));
        const std::uint32_t n = sample.size();
        for (std::size_t ri = 0; ri < r_values.size(); ++ri) {
            const auto cluster =
                lazy_cluster(sample, cut_functions[ri], src, sample.root_id(),
                             static_cast<std::uint32_t>(max_k) + 1);
            if (cluster.censored) continue;  // |C_0^R| > max k
            const std::uint32_t size = cluster.size();
            bool relevant = false;
            for (int k : k_values) relevant |= (static_cast<std::uint32_t>(k) == size);
            if (!relevant) continue;
            // C_0 differs from C_0^R iff some g-edge leaves the cut cluster.
            std::vector<std::uint8_t> inside(n, 0);
            for (std::uint32_t v : cluster.vertices) inside[v] = 1;
            bool leak = false;
            for (std::uint32_t v : cluster.vertices) {
                for (std::uint32_t w = 0; w < n && !leak; ++w) {
                    if (inside[w]) continue;
                    const double t =
                        g.profile(distance(sample.position(v), sample.position(w)));
                    if (t > 0.0 && src.by_ids(v, w) < t) leak = true;
                }
                if (leak) break;
            }
            if (!leak) continue;
            for (std::size_t ki = 0; ki < k_values.size(); ++ki)
                if (static_cast<std::uint32_t>(k_values[ki]) == size)
                    success[ri][ki][rep] = 1;
        }
    });

    std::map<std::pair<double, int>, Estimate> out;
    for (std::size_t ri = 0; ri < r_values.size(); ++ri)
        for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
            std::uint64_t hits = 0;
            for (auto b : success[ri][ki]) hits += b;
            out[{r_values[ri], k_values[ki]}] = Estimate::proportion(hits, reps);
        }
    return out;
}

std::vector<std::uint64_t> cluster_size_histogram(const ConnectionFunction& g,
                                                  double lambda, int n_factor,
                                                  double window_side, std::uint32_t cap,
                                                  std::uint64_t reps, std::uint64_t seed,
                                                  unsigned threads) {
    if (n_factor < 1) throw std::invalid_argument("histogram: N must be >= 1");
    if (cap < 1) throw std::invalid_argument("histogram: cap must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("histogram: lambda must be > 0");
    check_points_budget(g, lambda * n_factor, window_side, g.dim());

    std::vector<std::uint32_t> sizes(reps);
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "thin-rep", rep);
        const PointSample sample =
            rooted_sample(lambda * n_factor, window_side, g.dim(), rs);
        PairUniformSource src(derive_seed(rs, "pairs"));
        if (n_factor == 1) {
            sizes[rep] = lazy_cluster(sample, g, src, sample.root_id(), cap).size();
        } else {
            const SiteConfig sites =
                sample_site_config(sample.size(), sample.root_id(), 1.0 / n_factor,
                                   derive_seed(rs, "sites"));
            sizes[rep] = lazy_cluster(sample, g, src, sample.root_id(), cap,
                                      sites.open.data())
                             .size();
        }
    });

    std::vector<std::uint64_t> hist(cap, 0);
    for (std::uint32_t s : sizes) ++hist[std::min(s, cap) - 1];
    return hist;
}

Theorem2Report verify_theorem2(const ConnectionFunction& g, double lambda, double h,
                               int n_max, double window_side, std::uint64_t reps,
                               std::uint64_t seed, unsigned threads) {
    if (n_max < 1) throw std::invalid_argument("verify_theorem2: n_max must be >= 1");
    if (!(h >= 0.0)) throw std::invalid_argument("verify_theorem2: h must be >= 0");
    // For bounded support R the event {|C_0| >= n} depends only on the RCM
    // within a window of side n * diameter(support); callers pick L
    // accordingly. (See the README for the finite-window policy.)
    Theorem2Report report;
    report.m_h =
        estimate_mh(g, lambda, h, window_side, reps, derive_seed(seed, "mh"), threads);
    report.inconclusive = report.m_h.ci_hi >= 1.0;
    report.lambda_prime = lambda * (1.0 - report.m_h.value);
    if (report.inconclusive) return report;

    std::vector<int> ns(static_cast<std::size_t>(n_max));
    for (int i = 0; i < n_max; ++i) ns[static_cast<std::size_t>(i)] = i + 1;
    const auto psi_base = estimate_psi(g, lambda, ns, window_side, reps,
                                       derive_seed(seed, "psi-base"), threads);
    const auto psi_prime = estimate_psi(g, report.lambda_prime, ns, window_side, reps,
                                        derive_seed(seed, "psi-prime"), threads);

    const double m = report.m_h.value;
    const double var_m = report.m_h.stderr_ * report.m_h.stderr_;
    report.holds = true;
    for (int n : ns) {
        const Estimate& base = psi_base.at(n);
        const Estimate& prime = psi_prime.at(n);
        Theorem2Row row;
        row.n = n;
        row.lhs = prime.value;
        row.lhs_se = prime.stderr_;
        const double decay = std::exp(-h * n);
        row.rhs = base.value * decay / (1.0 - m);
        const double d_dpsi = decay / (1.0 - m);
        const double d_dm = base.value * decay / ((1.0 - m) * (1.0 - m));
        row.rhs_se = std::sqrt(d_dpsi * d_dpsi * base.stderr_ * base.stderr_ +
                               d_dm * d_dm * var_m);
        const double se = std::sqrt(row.lhs_se * row.lhs_se + row.rhs_se * row.rhs_se);
        const double diff = row.rhs - row.lhs;
        row.margin_sigma = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : (diff > 0.0 ? 1e9 : -1e9));
        if (row.margin_sigma < -3.0) report.holds = false;
        report.rows.push_back(row);
    }
    return report;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

}  // namespace

TransitivityReport transitivity_experiment(const ConnectionFunction& g, double lambda,
                                           double h, double K,
                                           const std::vector<int>& n_factors,
                                           std::uint64_t outer_reps,
                                           std::uint64_t inner_reps, std::uint64_t seed,
                                           unsigned threads,
                                           std::uint32_t subsample_max,
                                           std::uint64_t reference_reps) {
    if (n_factors.empty() || n_factors.front() != 1)
        throw std::invalid_argument("transitivity: N values must start at 1");
    for (std::size_t i = 1; i < n_factors.size(); ++i)
        if (n_factors[i] <= n_factors[i - 1])
            throw std::invalid_argument("transitivity: N values must ascend");
    if (outer_reps < 1 || inner_reps < 1)
        throw std::invalid_argument("transitivity: reps must be >= 1");
    check_points_budget(g, lambda * n_factors.back(), K, g.dim());

    TransitivityReport report;
    report.m_h_reference = estimate_mh(g, lambda, h, K, reference_reps,
                                       derive_seed(seed, "mh-ref"), threads);

    for (int N : n_factors) {
        const std::uint64_t n_seed = derive_seed(seed, "trans-N", static_cast<std::uint64_t>(N));
        std::vector<double> max_stats(outer_reps, 0.0);
        parallel_for(outer_reps, threads, [&](std::uint64_t rep) {
            const std::uint64_t rs = derive_seed(n_seed, "outer", rep);
            const PointSample sample = rooted_sample(lambda * N, K, g.dim(), rs);
            PairUniformSource src(derive_seed(rs, "pairs"));
            const BuildStrategy strategy = g.bounded_support() ? BuildStrategy::cell_list
                                                               : BuildStrategy::dense;
            const RcmGraph graph = build_graph(sample, g, src, strategy);
            const std::uint32_t n = graph.n;
            const std::uint32_t root = sample.root_id();

            // Subsample: the root plus deterministically chosen others.
            std::vector<std::uint32_t> chosen;
            if (n <= subsample_max) {
                chosen.resize(n);
                for (std::uint32_t v = 0; v < n; ++v) chosen[v] = v;
            } else {
                std::vector<std::uint32_t> others;
                others.reserve(n - 1);
                for (std::uint32_t v = 0; v < n; ++v)
                    if (v != root) others.push_back(v);
                Stream shuffle(derive_seed(rs, "subsample"));
                for (std::uint32_t i = 0; i + 1 < subsample_max; ++i) {
                    const auto j =
                        i + static_cast<std::uint32_t>(shuffle.next_below(others.size() - i));
                    std::swap(others[i], others[j]);
                }
                chosen.assign(others.begin(), others.begin() + (subsample_max - 1));
                chosen.push_back(root);
            }

            std::vector<std::uint64_t> hits(chosen.size(), 0);
            for (std::uint64_t it = 0; it < inner_reps; ++it) {
                const std::uint64_t is = derive_seed(rs, "inner", it);
                // The root is not part of the percolated vertex set: only x
                // itself is force-included in its own statistic.
                std::vector<std::uint8_t> open =
                    bernoulli_bits(n, 1.0 / N, derive_seed(is, "sites"));
                open[root] = 0;
                const GhostField ghost = sample_ghost(n, h, derive_seed(is, "ghost"));
                const auto green_reach = connected_to_green_all(graph, open, ghost);
                for (std::size_t xi = 0; xi < chosen.size(); ++xi)
                    if (green_reach[chosen[xi]]) ++hits[xi];
            }
            double best = 0.0;
            for (std::uint64_t c : hits)
                best = std::max(best, static_cast<double>(c) /
                                          static_cast<double>(inner_reps));
            max_stats[rep] = best;
        });

        TransitivityRow row;
        row.n_factor = N;
        row.max_stats = max_stats;
        std::vector<double> sorted = max_stats;
        std::sort(sorted.begin(), sorted.end());
        row.median_max = quantile_sorted(sorted, 0.5);
        row.q1_max = quantile_sorted(sorted, 0.25);
        row.q3_max = quantile_sorted(sorted, 0.75);
        double mean = 0.0;
        for (double v : sorted) mean += v;
        row.mean_max = mean / static_cast<double>(sorted.size());
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<REventRow> r_event_frequency(double lambda, double K, double s,
                                         double alpha, const std::vector<int>& n_factors,
                                         std::uint64_t reps, std::uint64_t seed, int dim,
                                         unsigned threads) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("r_event: alpha must lie in (0, 1/2)");
    const BoxLattice lat(K, s, dim);
    if (n_factors.empty()) throw std::invalid_argument("r_event: no N values");
    if (reps < 1) throw std::invalid_argument("r_event: reps must be >= 1");

    std::vector<REventRow> rows;
    for (int N : n_factors) {
        if (N < 1) throw std::invalid_argument("r_event: N must be >= 1");
        const double per_box_mean = static_cast<double>(N) * lambda * std::pow(s, dim);
        const double lo = (1.0 - alpha) * per_box_mean;
        const double hi = (1.0 + alpha) * per_box_mean;
        const std::uint64_t n_seed = derive_seed(seed, "revent-N", static_cast<std::uint64_t>(N));
        std::vector<std::uint8_t> ok(reps, 0);
        parallel_for(reps, threads, [&](std::uint64_t rep) {
            Stream stream(derive_seed(n_seed, "rep", rep));
            bool all_in = true;
            for (std::uint64_t b = 0; b < lat.n_boxes(); ++b) {
                const auto count = static_cast<double>(poisson_draw(stream, per_box_mean));
                if (!(count > lo && count < hi)) all_in = false;
                // Keep drawing: the draw count per replication stays fixed,
                // so thread scheduling cannot shift the stream.
            }
            ok[rep] = all_in ? 1 : 0;
        });
        std::uint64_t hits = 0;
        for (auto b : ok) hits += b;
        REventRow row;
        row.n_factor = N;
        row.frequency = Estimate::proportion(hits, reps);
        row.bound = exact::ldp_bound_eval(lambda, s, alpha, K, N, dim);
        rows.push_back(row);
    }
    return rows;
}

double window_pair_integral(const ConnectionFunction& g, double window_side,
                            double rel_tol) {
    // int_W int_W g(x-y) dx dy = 2^d int_{[0,L]^d} g(|u|) prod_a (L - u_a) du.
    const int d = g.dim();
    if (d > 3)
        throw std::invalid_argument("window_pair_integral: dim must be <= 3");
    const double L = window_side;
    std::function<double(int, double)> level = [&](int depth, double sq) -> double {
        if (depth == d) return g.profile(std::sqrt(sq));
        // Tighter tolerance on inner levels.
        const double tol = rel_tol * std::pow(0.1, d - 1 - depth);
        return integrate_adaptive(
            [&](double u) { return (L - u) * level(depth + 1, sq + u * u); }, 0.0, L,
            tol);
    };
    return std::pow(2.0, d) * level(0, 0.0);
}

MeckeReport mecke_edge_check(const ConnectionFunction& g, double lambda,
                             double window_side, std::uint64_t reps, std::uint64_t seed,
                             unsigned threads) {
    if (reps < 2) throw std::invalid_argument("mecke: reps must be >= 2");
    if (!(lambda > 0.0) || !(window_side > 0.0))
        throw std::invalid_argument("mecke: bad lambda or L");
    check_points_budget(g, lambda, window_side, g.dim());

    std::vector<double> counts(reps, 0.0);
    parallel_for(reps, threads, [&](std::uint64_t rep) {
        const std::uint64_t rs = derive_seed(seed, "mecke-rep", rep);
        const PointSample sample = sample_poisson(
            lambda, Box::cube(window_side, g.dim()), derive_seed(rs, "eta"));
        PairUniformSource src(derive_seed(rs, "pairs"));
        const std::uint32_t n = sample.size();
        std::uint64_t edges = 0;
        auto test = [&](std::uint32_t i, std::uint32_t j) {
            const double t = g.profile(distance(sample.position(i), sample.position(j)));
            if (t > 0.0 && src.by_ids(i, j) < t) ++edges;
        };
        if (g.bounded_support()) {
            CellGrid grid(sample, g.support_radius());
            for (std::size_t c = 0; c < grid.cells.size(); ++c) {
                if (grid.cells[c].empty()) continue;
                grid.for_half_neighbors(c, [&](std::size_t c2) {
                    const auto& pa = grid.cells[c];
                    const auto& pb = grid.cells[c2];
                    if (c == c2) {
                        for (std::size_t u = 0; u < pa.size(); ++u)
                            for (std::size_t v = u + 1; v < pa.size(); ++v)
                                test(pa[u], pa[v]);
                    } else {
                        for (std::uint32_t u : pa)
                            for (std::uint32_t v : pb) test(u, v);
                    }
                });
            }
        } else {
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = i + 1; j < n; ++j) test(i, j);
        }
        counts[rep] = static_cast<double>(edges);
    });

    const Estimate mean = Estimate::mean_of(counts);
    MeckeReport report;
    report.empirical_mean = mean.value;
    report.empirical_se = mean.stderr_;
    report.reference =
        lambda * lambda / 2.0 * window_pair_integral(g, window_side);
    report.z = mean.stderr_ > 0.0
                   ? (mean.value - report.reference) / mean.stderr_
                   : (mean.value == report.reference ? 0.0 : 1e9);
    report.reps = reps;
    return report;
}

}  // namespace rcm::est
