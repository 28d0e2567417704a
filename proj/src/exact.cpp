#include "rcm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rcm/geometry.hpp"
#include "rcm/percolation.hpp"

namespace rcm::exact {

namespace {

constexpr double kDominationTol = 1e-10;

std::uint32_t pow2(int k) { return 1u << k; }

}  // namespace

FiniteMeasure FiniteMeasure::product_bernoulli(int m, double p) {
    if (m < 0 || m > 20) throw std::invalid_argument("FiniteMeasure: bad m");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("FiniteMeasure: p outside [0,1]");
    FiniteMeasure f;
    f.m = m;
    f.prob.resize(pow2(m));
    for (std::uint32_t s = 0; s < f.prob.size(); ++s) {
        double w = 1.0;
        for (int i = 0; i < m; ++i) w *= (s >> i) & 1u ? p : 1.0 - p;
        f.prob[s] = w;
    }
    return f;
}

FiniteMeasure FiniteMeasure::point_mass(int m, std::uint32_t state) {
    FiniteMeasure f;
    f.m = m;
    f.prob.assign(pow2(m), 0.0);
    f.prob.at(state) = 1.0;
    return f;
}

double FiniteMeasure::mass(std::uint32_t state_set) const {
    double total = 0.0;
    for (std::uint32_t s = 0; s < prob.size(); ++s)
        if ((state_set >> s) & 1u) total += prob[s];
    return total;
}

void FiniteMeasure::validate() const {
    if (prob.size() != pow2(m)) throw std::invalid_argument("FiniteMeasure: bad size");
    double sum = 0.0;
    for (double v : prob) {
        if (v < 0.0) throw std::invalid_argument("FiniteMeasure: negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("FiniteMeasure: probabilities do not sum to 1");
}

RcmGraph make_graph(std::uint32_t n,
                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                    std::optional<std::uint32_t> root) {
    RcmGraph g;
    g.n = n;
    g.adj.resize(n);
    g.root = root;
    g.g_tag = "explicit";
    for (auto [a, b] : edges) {
        if (a >= n || b >= n || a == b)
            throw std::invalid_argument("make_graph: bad edge");
        g.adj[a].push_back(b);
        g.adj[b].push_back(a);
    }
    for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
    return g;
}

namespace {

// Connectivity of a k-vertex graph given as an edge-subset mask over the
// pairs listed in `pairs`.
bool connects_all(int k, const std::vector<std::pair<int, int>>& pairs,
                  std::uint32_t edge_mask) {
    std::uint32_t reach = 1u;  // vertex 0
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if (!((edge_mask >> e) & 1u)) continue;
            const std::uint32_t a = 1u << pairs[e].first;
            const std::uint32_t b = 1u << pairs[e].second;
            if ((reach & a) && !(reach & b)) reach |= b, grew = true;
            else if ((reach & b) && !(reach & a)) reach |= a, grew = true;
        }
    }
    return reach == (pow2(k) - 1u);
}

}  // namespace

double g2_exact(const std::vector<std::vector<double>>& points,
                const ConnectionFunction& g) {
    const int k = static_cast<int>(points.size());
    if (k < 2 || k > 6)
        throw std::invalid_argument("g2_exact: need 2 to 6 points");
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != g.dim())
            throw std::invalid_argument("g2_exact: dimension mismatch");
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> pe;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double d = distance(points[i], points[j]);
            if (d == 0.0) throw std::invalid_argument("g2_exact: duplicate points");
            pairs.emplace_back(i, j);
            pe.push_back(g.profile(d));
        }
    const std::uint32_t n_masks = pow2(static_cast<int>(pairs.size()));
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        if (!connects_all(k, pairs, mask)) continue;
        double w = 1.0;
        for (std::size_t e = 0; e < pairs.size(); ++e)
            w *= ((mask >> e) & 1u) ? pe[e] : 1.0 - pe[e];
        total += w;
    }
    return total;
}

namespace {

// Root component (as a vertex bitmask) over open vertices, edges given as an
// adjacency bitmask per vertex.
std::uint32_t root_component(int n, const std::vector<std::uint32_t>& adj_mask,
                             std::uint32_t open_mask, int root) {
    std::uint32_t comp = 1u << root;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int v = 0; v < n; ++v) {
            if (!((comp >> v) & 1u)) continue;
            const std::uint32_t next = adj_mask[static_cast<std::size_t>(v)] & open_mask & ~comp;
            if (next) comp |= next, grew = true;
        }
    }
    return comp;
}

}  // namespace

ClusterLaw cluster_law_exact(const std::vector<std::vector<double>>& points,
                             std::size_t root_index, const ConnectionFunction& g,
                             double p, double h) {
    const int n = static_cast<int>(points.size());
    if (n < 1 || n > 5)
        throw std::invalid_argument("cluster_law_exact: need 1 to 5 points");
    if (root_index >= points.size())
        throw std::invalid_argument("cluster_law_exact: bad root index");
    if (!(p >= 0.0 && p <= 1.0) || !(h >= 0.0))
        throw std::invalid_argument("cluster_law_exact: bad p or h");

    std::vector<std::pair<int, int>> pairs;
    std::vector<double> pe;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
            pe.push_back(g.profile(distance(points[static_cast<std::size_t>(i)],
                                            points[static_cast<std::size_t>(j)])));
        }

    // Non-root vertices in ascending order carry the site bits.
    std::vector<int> sites;
    for (int v = 0; v < n; ++v)
        if (v != static_cast<int>(root_index)) sites.push_back(v);
    const int m = static_cast<int>(sites.size());
    const double q = -std::expm1(-h);

    ClusterLaw law;
    law.p_size_ghostfree.assign(static_cast<std::size_t>(n), 0.0);
    law.p_size_ghosthit.assign(static_cast<std::size_t>(n), 0.0);
    law.size_pmf.assign(static_cast<std::size_t>(n), 0.0);
    law.omega_given_ghostfree.m = m;
    law.omega_given_ghostfree.prob.assign(pow2(m), 0.0);

    for (std::uint32_t em = 0; em < pow2(static_cast<int>(pairs.size())); ++em) {
        double w_edges = 1.0;
        std::vector<std::uint32_t> adj_mask(static_cast<std::size_t>(n), 0);
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if ((em >> e) & 1u) {
                w_edges *= pe[e];
                adj_mask[static_cast<std::size_t>(pairs[e].first)] |= 1u << pairs[e].second;
                adj_mask[static_cast<std::size_t>(pairs[e].second)] |= 1u << pairs[e].first;
            } else {
                w_edges *= 1.0 - pe[e];
            }
        }
        if (w_edges == 0.0) continue;
        for (std::uint32_t sm = 0; sm < pow2(m); ++sm) {
            double w_sites = 1.0;
            std::uint32_t open_mask = 1u << root_index;
            for (int i = 0; i < m; ++i) {
                if ((sm >> i) & 1u) {
                    w_sites *= p;
                    open_mask |= 1u << sites[static_cast<std::size_t>(i)];
                } else {
                    w_sites *= 1.0 - p;
                }
            }
            if (w_sites == 0.0) continue;
            const std::uint32_t comp =
                root_component(n, adj_mask, open_mask, static_cast<int>(root_index));
            const int size = std::popcount(comp);
            for (std::uint32_t gm = 0; gm < pow2(n); ++gm) {
                double w_ghost = 1.0;
                for (int v = 0; v < n; ++v)
                    w_ghost *= ((gm >> v) & 1u) ? q : 1.0 - q;
                if (w_ghost == 0.0) continue;
                const double w = w_edges * w_sites * w_ghost;
                const bool free = (comp & gm) == 0;
                law.size_pmf[static_cast<std::size_t>(size - 1)] += w;
                if (free) {
                    law.p_size_ghostfree[static_cast<std::size_t>(size - 1)] += w;
                    law.p_ghostfree += w;
                    law.omega_given_ghostfree.prob[sm] += w;
                } else {
                    law.p_size_ghosthit[static_cast<std::size_t>(size - 1)] += w;
                }
            }
        }
    }
    if (law.p_ghostfree > 0.0)
        for (double& v : law.omega_given_ghostfree.prob) v /= law.p_ghostfree;
    return law;
}

double tv_binomial_poisson(int n, double p) {
    if (n < 1) throw std::invalid_argument("tv_binomial_poisson: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("tv_binomial_poisson: p outside [0,1]");
    if (p == 0.0) return 0.0;
    const double mean = static_cast<double>(n) * p;
    double diff_sum = 0.0;
    double poisson_cum = 0.0;
    for (int k = 0; k <= n; ++k) {
        // log pmfs keep extreme tails finite.
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                 std::lgamma(n - k + 1.0) +
                                 (p < 1.0 ? k * std::log(p) + (n - k) * std::log1p(-p)
                                          : (k == n ? 0.0 : -1.0 / 0.0));
        const double b = std::exp(log_binom);
        const double q = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
        diff_sum += std::fabs(b - q);
        poisson_cum += q;
    }
    const double poisson_tail = std::max(0.0, 1.0 - poisson_cum);
    return 0.5 * (diff_sum + poisson_tail);
}

double poisson_product_pmf(double mu, const std::vector<long long>& counts) {
    if (!(mu > 0.0)) throw std::invalid_argument("poisson_product_pmf: mu must be > 0");
    double log_p = 0.0;
    for (long long c : counts) {
        if (c < 0) throw std::invalid_argument("poisson_product_pmf: negative count");
        log_p += -mu + static_cast<double>(c) * std::log(mu) - std::lgamma(c + 1.0);
    }
    return std::exp(log_p);
}

double ghat_pattern_prob(const DiscreteGraphPattern& f) {
    const int m = static_cast<int>(f.vertices.size());
    if (m < 1) throw std::invalid_argument("ghat_pattern_prob: empty pattern");
    if (static_cast<int>(f.ghat.size()) != m)
        throw std::invalid_argument("ghat_pattern_prob: missing pair values");
    for (const auto& row : f.ghat)
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("ghat_pattern_prob: missing pair values");
    std::vector<std::vector<std::uint8_t>> is_edge(
        static_cast<std::size_t>(m), std::vector<std::uint8_t>(static_cast<std::size_t>(m), 0));
    for (auto [a, b] : f.edges) {
        if (a < 0 || b < 0 || a >= m || b >= m || a == b)
            throw std::invalid_argument("ghat_pattern_prob: bad edge");
        is_edge[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
        is_edge[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
    }
    double prob = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double v = f.ghat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            prob *= is_edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ? v : 1.0 - v;
        }
    return prob;
}

std::vector<std::uint32_t> enumerate_upsets(int m) {
    if (m < 0 || m > 4) throw std::invalid_argument("enumerate_upsets: m must be <= 4");
    const std::uint32_t n_states = pow2(m);
    // Successor states of s: flip each 0 bit to 1.
    std::vector<std::uint32_t> succ(n_states, 0);
    for (std::uint32_t s = 0; s < n_states; ++s)
        for (int b = 0; b < m; ++b)
            if (!((s >> b) & 1u)) succ[s] |= 1u << (s | (1u << b));
    std::vector<std::uint32_t> upsets;
    const std::uint64_t n_subsets = 1ull << n_states;
    for (std::uint64_t set = 0; set < n_subsets; ++set) {
        bool closed = true;
        for (std::uint32_t s = 0; s < n_states && closed; ++s)
            if ((set >> s) & 1ull)
                closed = (set & succ[s]) == succ[s];
        if (closed) upsets.push_back(static_cast<std::uint32_t>(set));
    }
    return upsets;
}

DominationResult stochastic_dominates(const FiniteMeasure& mu, const FiniteMeasure& nu) {
    if (mu.m != nu.m) throw std::invalid_argument("stochastic_dominates: dimension mismatch");
    DominationResult r;
    r.dominates = true;
    for (std::uint32_t u : enumerate_upsets(mu.m)) {
        const double gap = mu.mass(u) - nu.mass(u);
        if (gap > r.worst_gap) r.worst_gap = gap;
        if (gap > kDominationTol && r.dominates) {
            r.dominates = false;
            r.witness_upset = u;
        }
    }
    return r;
}

namespace {

struct PivotalSetup {
    int n = 0;
    int m = 0;                                // non-root count
    std::uint32_t root = 0;
    std::vector<std::uint32_t> sites;         // bit index -> vertex id
    std::vector<int> site_of;                 // vertex id -> bit index (-1 for root)
    std::vector<std::uint32_t> adj_mask;      // vertex id -> neighbor mask
    std::vector<std::uint32_t> cluster_of;    // site mask -> root component vertex mask

    PivotalSetup(const RcmGraph& graph, std::uint32_t root_in) {
        if (graph.n < 1 || graph.n > 5)
            throw std::invalid_argument("pivotal oracle: graph must have 1 to 5 vertices");
        if (root_in >= graph.n) throw std::invalid_argument("pivotal oracle: bad root");
        n = static_cast<int>(graph.n);
        root = root_in;
        site_of.assign(static_cast<std::size_t>(n), -1);
        for (std::uint32_t v = 0; v < graph.n; ++v)
            if (v != root) {
                site_of[v] = static_cast<int>(sites.size());
                sites.push_back(v);
            }
        m = static_cast<int>(sites.size());
        adj_mask.assign(static_cast<std::size_t>(n), 0);
        for (std::uint32_t v = 0; v < graph.n; ++v)
            for (std::uint32_t w : graph.adj[v]) adj_mask[v] |= 1u << w;
        cluster_of.resize(pow2(m));
        for (std::uint32_t sm = 0; sm < pow2(m); ++sm)
            cluster_of[sm] = root_component(n, adj_mask, open_mask(sm), static_cast<int>(root));
    }

    std::uint32_t open_mask(std::uint32_t site_mask) const {
        std::uint32_t mask = 1u << root;
        for (int i = 0; i < m; ++i)
            if ((site_mask >> i) & 1u) mask |= 1u << sites[static_cast<std::size_t>(i)];
        return mask;
    }
};

}  // namespace

PivotalEpsilon max_pivotal_epsilon(const RcmGraph& graph, std::uint32_t root, double p,
                                   double h) {
    if (!(p >= 0.0 && p <= 1.0) || !(h >= 0.0))
        throw std::invalid_argument("max_pivotal_epsilon: bad p or h");
    PivotalSetup setup(graph, root);
    const int m = setup.m;
    const int n = setup.n;
    const double q = -std::expm1(-h);

    // Site-mask weights and exploration traces.
    std::vector<double> w_sites(pow2(m));
    std::vector<ExplorationTrace> traces(pow2(m));
    const auto order = id_order(graph.n, root);
    for (std::uint32_t sm = 0; sm < pow2(m); ++sm) {
        double w = 1.0;
        SiteConfig sc;
        sc.p = p;
        sc.root = root;
        sc.open.assign(static_cast<std::size_t>(n), 0);
        sc.open[root] = 1;
        for (int i = 0; i < m; ++i) {
            const bool bit = (sm >> i) & 1u;
            w *= bit ? p : 1.0 - p;
            sc.open[setup.sites[static_cast<std::size_t>(i)]] = bit ? 1 : 0;
        }
        w_sites[sm] = w;
        traces[sm] = exploration_run(graph, sc, root, order);
    }

    std::vector<double> w_ghost(pow2(n));
    for (std::uint32_t gm = 0; gm < pow2(n); ++gm) {
        double w = 1.0;
        for (int v = 0; v < n; ++v) w *= ((gm >> v) & 1u) ? q : 1.0 - q;
        w_ghost[gm] = w;
    }

    auto event_holds = [&](std::uint32_t sm, std::uint32_t gm) {
        return (setup.cluster_of[sm] & gm) == 0;
    };

    PivotalEpsilon result;
    // Group site masks by exploration prefix at each depth k.
    for (int k = 0; k + 1 <= m; ++k) {
        std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> groups;
        for (std::uint32_t sm = 0; sm < pow2(m); ++sm) {
            std::vector<std::uint32_t> key;
            for (int j = 0; j < k; ++j) {
                key.push_back(traces[sm].order[static_cast<std::size_t>(j)]);
                key.push_back(traces[sm].states[static_cast<std::size_t>(j)]);
            }
            groups[key].push_back(sm);
        }
        for (const auto& [key, members] : groups) {
            const std::uint32_t next = traces[members.front()].order[static_cast<std::size_t>(k)];
            const int next_site = setup.site_of[next];
            double denom = 0.0, numer = 0.0;
            for (std::uint32_t sm : members) {
                for (std::uint32_t gm = 0; gm < pow2(n); ++gm) {
                    const double w = w_sites[sm] * w_ghost[gm];
                    if (w == 0.0 || !event_holds(sm, gm)) continue;
                    denom += w;
                    const std::uint32_t sm0 = sm & ~(1u << next_site);
                    const std::uint32_t sm1 = sm | (1u << next_site);
                    if (event_holds(sm0, gm) != event_holds(sm1, gm)) numer += w;
                }
            }
            if (denom <= 0.0) continue;  // A never meets this prefix
            PivotalPrefix row;
            for (int j = 0; j < k; ++j) {
                row.prefix_vertices.push_back(key[static_cast<std::size_t>(2 * j)]);
                row.prefix_states.push_back(
                    static_cast<std::uint8_t>(key[static_cast<std::size_t>(2 * j + 1)]));
            }
            row.next_vertex = next;
            row.pivotal_prob = numer / denom;
            result.epsilon = std::max(result.epsilon, row.pivotal_prob);
            result.table.push_back(std::move(row));
        }
    }
    return result;
}

LemmaPivotalReport verify_lemma_pivotal(const RcmGraph& graph, std::uint32_t root,
                                        double p, double h) {
    PivotalSetup setup(graph, root);
    const int m = setup.m;

    LemmaPivotalReport report;
    const auto eps = max_pivotal_epsilon(graph, root, p, h);
    report.epsilon = eps.epsilon;

    // Conditional law of omega given A, ghosts marginalized analytically:
    // P(A | omega) = exp(-h |C0(omega)|).
    FiniteMeasure cond;
    cond.m = m;
    cond.prob.assign(pow2(m), 0.0);
    double p_a = 0.0;
    for (std::uint32_t sm = 0; sm < pow2(m); ++sm) {
        double w = 1.0;
        for (int i = 0; i < m; ++i) w *= ((sm >> i) & 1u) ? p : 1.0 - p;
        const double given =
            std::exp(-h * static_cast<double>(std::popcount(setup.cluster_of[sm])));
        cond.prob[sm] = w * given;
        p_a += w * given;
    }
    report.p_event = p_a;
    if (p_a <= 0.0) {
        report.vacuous = true;
        return report;
    }
    for (double& v : cond.prob) v /= p_a;

    const auto prod = FiniteMeasure::product_bernoulli(m, p * (1.0 - eps.epsilon));
    const auto dom = stochastic_dominates(prod, cond);
    report.dominates = dom.dominates;
    report.witness_upset = dom.witness_upset;
    return report;
}

std::vector<RcmGraph> enumerate_rooted_graphs(int max_nonroot) {
    if (max_nonroot < 0 || max_nonroot > 4)
        throw std::invalid_argument("enumerate_rooted_graphs: max_nonroot must be <= 4");
    std::vector<RcmGraph> out;
    for (int m = 0; m <= max_nonroot; ++m) {
        const int n = m + 1;  // root is vertex 0
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        std::vector<int> perm(static_cast<std::size_t>(m));
        std::vector<std::uint32_t> seen;
        for (std::uint32_t mask = 0; mask < pow2(static_cast<int>(pairs.size())); ++mask) {
            if (!connects_all(n, pairs, mask)) continue;
            // Canonical form: the minimum edge mask over relabelings of the
            // non-root vertices.
            std::iota(perm.begin(), perm.end(), 1);
            std::uint32_t canon = mask;
            do {
                std::uint32_t relabeled = 0;
                for (std::size_t e = 0; e < pairs.size(); ++e) {
                    if (!((mask >> e) & 1u)) continue;
                    auto map_v = [&](int v) {
                        return v == 0 ? 0 : perm[static_cast<std::size_t>(v - 1)];
                    };
                    int a = map_v(pairs[e].first);
                    int b = map_v(pairs[e].second);
                    if (a > b) std::swap(a, b);
                    for (std::size_t e2 = 0; e2 < pairs.size(); ++e2)
                        if (pairs[e2] == std::make_pair(a, b)) {
                            relabeled |= 1u << e2;
                            break;
                        }
                }
                canon = std::min(canon, relabeled);
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (std::find(seen.begin(), seen.end(), canon) != seen.end()) continue;
            seen.push_back(canon);
            std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
            for (std::size_t e = 0; e < pairs.size(); ++e)
                if ((canon >> e) & 1u)
                    edges.emplace_back(static_cast<std::uint32_t>(pairs[e].first),
                                       static_cast<std::uint32_t>(pairs[e].second));
            out.push_back(make_graph(static_cast<std::uint32_t>(n), edges, 0));
        }
    }
    return out;
}

bool cramer_rate_check(const std::vector<double>& alphas) {
    for (double a : alphas) {
        if (!(a > 0.0 && a <= 0.5))
            throw std::invalid_argument("cramer_rate_check: alpha outside (0, 1/2]");
        const double upper = (1.0 + a) * std::log1p(a) - a;
        const double lower = a + (1.0 - a) * std::log1p(-a);
        if (upper < a * a / 4.0) return false;
        if (lower < a * a / 12.0) return false;
    }
    return true;
}

double ldp_bound_eval(double lambda, double s, double alpha, double window_side,
                      double n_factor, int dim) {
    if (!(lambda > 0.0) || !(s > 0.0) || !(window_side > 0.0) || !(n_factor > 0.0) ||
        dim < 1)
        throw std::invalid_argument("ldp_bound_eval: parameters must be positive");
    if (!(alpha >= 0.0 && alpha <= 0.5))
        throw std::invalid_argument("ldp_bound_eval: alpha outside [0, 1/2]");
    const double ratio = window_side / s;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9)
        throw std::invalid_argument("ldp_bound_eval: K/s must be an integer");
    const double boxes = std::pow(ratio, dim);
    const double exponent = lambda * std::pow(s, dim) * alpha * alpha * n_factor / 24.0;
    return 1.0 - 2.0 * boxes * std::exp(-exponent);
}

}  // namespace rcm::exact
