#include "rcm/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcm {

namespace {
constexpr std::uint64_t kSiteTag = hash_tag("site-bit");
constexpr std::uint64_t kGhostTag = hash_tag("ghost-bit");

double keyed_unit(std::uint64_t seed, std::uint64_t tag, std::uint64_t id) {
    std::uint64_t h = mix64(seed ^ tag);
    h = mix64(h ^ (id + kGolden));
    return bits_to_unit(h);
}
}  // namespace

std::vector<std::uint8_t> bernoulli_bits(std::uint32_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("bernoulli_bits: p outside [0,1]");
    std::vector<std::uint8_t> bits(n);
    for (std::uint32_t v = 0; v < n; ++v)
        bits[v] = keyed_unit(seed, kSiteTag, v) < p ? 1 : 0;
    return bits;
}

SiteConfig sample_site_config(std::uint32_t n_vertices, std::uint32_t root, double p,
                              std::uint64_t seed) {
    if (root >= n_vertices) throw std::invalid_argument("sample_site_config: bad root");
    SiteConfig sc;
    sc.p = p;
    sc.root = root;
    sc.open = bernoulli_bits(n_vertices, p, seed);
    sc.open[root] = 1;
    return sc;
}

SiteConfig sample_site_config(const RcmGraph& graph, std::uint32_t root, double p,
                              std::uint64_t seed) {
    return sample_site_config(graph.n, root, p, seed);
}

GhostField sample_ghost(std::uint32_t n_vertices, double h, std::uint64_t seed) {
    if (!(h >= 0.0)) throw std::invalid_argument("sample_ghost: h must be >= 0");
    GhostField g;
    g.h = h;
    const double q = -std::expm1(-h);  // 1 - e^{-h}
    g.green.resize(n_vertices);
    for (std::uint32_t v = 0; v < n_vertices; ++v)
        g.green[v] = keyed_unit(seed, kGhostTag, v) < q ? 1 : 0;
    return g;
}

ThinnedGraph thinned_graph(const RcmGraph& graph, const SiteConfig& sites,
                           std::uint32_t root) {
    if (sites.open.size() != graph.n)
        throw std::invalid_argument("thinned_graph: index mismatch");
    if (root >= graph.n) throw std::invalid_argument("thinned_graph: bad root");
    ThinnedGraph out;
    std::vector<std::uint32_t> new_id(graph.n, UINT32_MAX);
    for (std::uint32_t v = 0; v < graph.n; ++v) {
        if (v == root || sites.open[v]) {
            new_id[v] = static_cast<std::uint32_t>(out.original_ids.size());
            out.original_ids.push_back(v);
        }
    }
    out.root = new_id[root];
    out.graph.n = static_cast<std::uint32_t>(out.original_ids.size());
    out.graph.adj.resize(out.graph.n);
    out.graph.root = out.root;
    out.graph.g_tag = graph.g_tag + "|thinned";
    for (std::uint32_t v = 0; v < graph.n; ++v) {
        if (new_id[v] == UINT32_MAX) continue;
        for (std::uint32_t w : graph.adj[v])
            if (w > v && new_id[w] != UINT32_MAX) {
                out.graph.adj[new_id[v]].push_back(new_id[w]);
                out.graph.adj[new_id[w]].push_back(new_id[v]);
            }
    }
    for (auto& nb : out.graph.adj) std::sort(nb.begin(), nb.end());
    return out;
}

ThinningResult thinning_construction(double lambda, int n_factor,
                                     const ConnectionFunction& g, const Box& window,
                                     std::uint64_t seed) {
    if (n_factor < 1) throw std::invalid_argument("thinning_construction: N must be >= 1");
    if (!(lambda > 0.0))
        throw std::invalid_argument("thinning_construction: lambda must be > 0");
    ThinningResult r;
    PointSample eta = sample_poisson(lambda * n_factor, window, derive_seed(seed, "eta"));
    std::vector<double> origin(static_cast<std::size_t>(window.dim), 0.0);
    r.sample = add_root(eta, origin);
    PairUniformSource src(derive_seed(seed, "pairs"));
    const BuildStrategy strategy =
        g.bounded_support() ? BuildStrategy::cell_list : BuildStrategy::dense;
    r.dense = build_graph(r.sample, g, src, strategy);
    r.sites = sample_site_config(r.dense, r.sample.root_id(), 1.0 / n_factor,
                                 derive_seed(seed, "sites"));
    r.thinned = thinned_graph(r.dense, r.sites, r.sample.root_id());
    return r;
}

std::vector<std::uint32_t> id_order(std::uint32_t n, std::uint32_t root) {
    std::vector<std::uint32_t> order;
    order.reserve(n - 1);
    for (std::uint32_t v = 0; v < n; ++v)
        if (v != root) order.push_back(v);
    return order;
}

ExplorationTrace exploration_run(const RcmGraph& graph, const SiteConfig& sites,
                                 std::uint32_t root,
                                 const std::vector<std::uint32_t>& fixed_order) {
    if (root >= graph.n) throw std::invalid_argument("exploration_run: bad root");
    if (sites.open.size() != graph.n)
        throw std::invalid_argument("exploration_run: sites/graph mismatch");
    if (fixed_order.size() != graph.n - 1)
        throw std::invalid_argument("exploration_run: fixed_order must cover non-root vertices");
    {
        std::vector<std::uint8_t> seen(graph.n, 0);
        seen[root] = 1;
        for (std::uint32_t v : fixed_order) {
            if (v >= graph.n || seen[v])
                throw std::invalid_argument("exploration_run: fixed_order not a permutation");
            seen[v] = 1;
        }
    }

    std::vector<std::uint8_t> revealed(graph.n, 0);
    std::vector<std::uint8_t> in_cluster(graph.n, 0);
    in_cluster[root] = 1;
    revealed[root] = 1;

    auto adjacent_to_cluster = [&](std::uint32_t v) {
        for (std::uint32_t w : graph.adj[v])
            if (in_cluster[w]) return true;
        return false;
    };

    ExplorationTrace trace;
    trace.order.reserve(graph.n - 1);
    trace.states.reserve(graph.n - 1);
    for (std::uint32_t step = 0; step + 1 < graph.n; ++step) {
        // The lowest-index unrevealed vertex touching the cluster; when none
        // remain, the lowest-index unrevealed vertex outright.
        std::uint32_t next = UINT32_MAX;
        bool cluster_step = false;
        for (std::uint32_t v : fixed_order) {
            if (revealed[v]) continue;
            if (adjacent_to_cluster(v)) {
                next = v;
                cluster_step = true;
                break;
            }
        }
        if (!cluster_step) {
            for (std::uint32_t v : fixed_order)
                if (!revealed[v]) {
                    next = v;
                    break;
                }
        }
        revealed[next] = 1;
        trace.order.push_back(next);
        trace.states.push_back(sites.open[next]);
        if (cluster_step && sites.open[next]) in_cluster[next] = 1;
    }
    return trace;
}

bool is_pivotal(const SiteConfig& sites, const GhostField& ghost, std::uint32_t x,
                const EventPredicate& event) {
    if (x >= sites.open.size()) throw std::invalid_argument("is_pivotal: bad vertex");
    if (sites.root && *sites.root == x)
        throw std::invalid_argument("is_pivotal: x must not be the root");
    SiteConfig flip = sites;
    flip.open[x] = 0;
    const bool at0 = event(flip, ghost);
    flip.open[x] = 1;
    const bool at1 = event(flip, ghost);
    return at0 != at1;
}

bool connected_to_green(const RcmGraph& graph, const std::vector<std::uint8_t>& open,
                        const GhostField& ghost, std::uint32_t x) {
    if (x >= graph.n) throw std::invalid_argument("connected_to_green: bad vertex");
    if (open.size() != graph.n || ghost.green.size() != graph.n)
        throw std::invalid_argument("connected_to_green: size mismatch");
    if (ghost.green[x]) return true;
    // BFS over open vertices starting from x's open neighbors.
    std::vector<std::uint8_t> seen(graph.n, 0);
    seen[x] = 1;
    std::vector<std::uint32_t> queue{x};
    std::size_t head = 0;
    while (head < queue.size()) {
        const std::uint32_t v = queue[head++];
        for (std::uint32_t w : graph.adj[v]) {
            if (seen[w] || !open[w]) continue;
            if (ghost.green[w]) return true;
            seen[w] = 1;
            queue.push_back(w);
        }
    }
    return false;
}

bool connected_to_green(const RcmGraph& graph, const SiteConfig& sites,
                        const GhostField& ghost, std::uint32_t x) {
    return connected_to_green(graph, sites.open, ghost, x);
}

std::vector<std::uint8_t> connected_to_green_all(const RcmGraph& graph,
                                                 const std::vector<std::uint8_t>& open,
                                                 const GhostField& ghost) {
    if (open.size() != graph.n || ghost.green.size() != graph.n)
        throw std::invalid_argument("connected_to_green_all: size mismatch");
    // Union the open-induced components, flag those holding an open green
    // vertex, then answer per vertex through its open neighbors.
    std::vector<std::uint32_t> parent(graph.n);
    for (std::uint32_t v = 0; v < graph.n; ++v) parent[v] = v;
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::uint32_t v = 0; v < graph.n; ++v) {
        if (!open[v]) continue;
        for (std::uint32_t w : graph.adj[v])
            if (w > v && open[w]) {
                const std::uint32_t a = find(v), b = find(w);
                if (a != b) parent[a] = b;
            }
    }
    std::vector<std::uint8_t> comp_green(graph.n, 0);
    for (std::uint32_t v = 0; v < graph.n; ++v)
        if (open[v] && ghost.green[v]) comp_green[find(v)] = 1;

    std::vector<std::uint8_t> out(graph.n, 0);
    for (std::uint32_t v = 0; v < graph.n; ++v) {
        if (ghost.green[v]) {
            out[v] = 1;
            continue;
        }
        for (std::uint32_t w : graph.adj[v])
            if (open[w] && comp_green[find(w)]) {
                out[v] = 1;
                break;
            }
    }
    return out;
}

}  // namespace rcm
