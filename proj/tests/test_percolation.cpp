#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "rcm/exact.hpp"
#include "rcm/percolation.hpp"
#include "rcm/rng.hpp"

using namespace rcm;

namespace {

RcmGraph path_graph(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return exact::make_graph(n, edges, 0);
}

}  // namespace

TEST_CASE("site configs obey p = 0, p = 1 and the root rule") {
    const auto g = path_graph(6);
    const auto all = sample_site_config(g, 0, 1.0, 7);
    for (auto b : all.open) CHECK(b == 1);

    const auto none = sample_site_config(g, 0, 0.0, 7);
    CHECK(none.open[0] == 1);  // root stays open
    for (std::uint32_t v = 1; v < 6; ++v) CHECK(none.open[v] == 0);

    CHECK_THROWS_AS((void)sample_site_config(g, 0, 1.5, 7), std::invalid_argument);
}

TEST_CASE("site bits hit their frequency per vertex") {
    const auto g = path_graph(4);
    std::map<std::uint32_t, int> open_counts;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
        const auto sc = sample_site_config(g, 0, 0.3, static_cast<std::uint64_t>(i));
        for (std::uint32_t v = 1; v < 4; ++v) open_counts[v] += sc.open[v];
    }
    const double band = 3.0 * std::sqrt(0.3 * 0.7 / reps);
    for (std::uint32_t v = 1; v < 4; ++v)
        CHECK(std::fabs(open_counts[v] / static_cast<double>(reps) - 0.3) < band);
}

TEST_CASE("ghost fields at the edge intensities") {
    const auto none = sample_ghost(50, 0.0, 3);
    for (auto b : none.green) CHECK(b == 0);

    // h = 50: per-vertex miss probability e^{-50} ~ 2e-22.
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto all = sample_ghost(20, 50.0, seed);
        for (auto b : all.green) CHECK(b == 1);
    }

    std::uint64_t greens = 0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i)
        greens += sample_ghost(1, std::log(2.0), static_cast<std::uint64_t>(i)).green[0];
    const double freq = static_cast<double>(greens) / reps;
    CHECK(std::fabs(freq - 0.5) < 3.0 * std::sqrt(0.25 / reps));

    CHECK_THROWS_AS((void)sample_ghost(3, -0.1, 1), std::invalid_argument);
}

TEST_CASE("thinned graph keeps the open vertices plus the root") {
    const auto g = path_graph(5);

    SiteConfig all{std::vector<std::uint8_t>(5, 1), 1.0, 0};
    const auto full = thinned_graph(g, all, 0);
    CHECK(full.graph.n == 5);
    CHECK(full.graph.edge_count() == 4);

    SiteConfig none{std::vector<std::uint8_t>(5, 0), 0.0, 0};
    none.open[0] = 1;
    const auto lone = thinned_graph(g, none, 0);
    CHECK(lone.graph.n == 1);
    CHECK(lone.graph.edge_count() == 0);

    // Path rooted at an end with the middle vertex closed: root component 2.
    SiteConfig mid{std::vector<std::uint8_t>{1, 1, 0, 1, 1}, 0.5, 0};
    const auto cut = thinned_graph(g, mid, 0);
    const auto comp = explore_cluster(cut.graph, cut.root, 100);
    CHECK(comp.size() == 2);
}

TEST_CASE("thinning construction at N = 1 keeps everything") {
    const auto g = ConnectionFunction::indicator(1.0, 2);
    const auto r = thinning_construction(0.8, 1, g, Box::cube(5.0, 2), 99);
    CHECK(r.thinned.graph.n == r.dense.n);
    CHECK(r.thinned.graph.adj == r.dense.adj);
    for (auto b : r.sites.open) CHECK(b == 1);
}

TEST_CASE("thinning keeps lambda |window| open points on average") {
    const auto g = ConnectionFunction::indicator(1.0, 2);
    const Box win = Box::cube(4.0, 2);
    const int reps = 2000;
    double open_total = 0.0;
    for (int i = 0; i < reps; ++i) {
        const auto r =
            thinning_construction(0.5, 8, g, win, static_cast<std::uint64_t>(i));
        open_total += static_cast<double>(r.thinned.graph.n) - 1.0;  // minus root
    }
    const double mean = open_total / reps;
    const double expected = 0.5 * 16.0;
    // var of a thinned Poisson count is its mean
    CHECK(std::fabs(mean - expected) < 3.0 * std::sqrt(expected / reps));
}

TEST_CASE("exploration follows the cluster-first rule") {
    // Isolated root: straight fixed_order sweep.
    const auto lone = exact::make_graph(4, {}, 0);
    SiteConfig sc{std::vector<std::uint8_t>{1, 1, 0, 1}, 0.5, 0};
    const auto order = id_order(4, 0);
    const auto t = exploration_run(lone, sc, 0, order);
    CHECK(t.order == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(t.states == std::vector<std::uint8_t>{1, 0, 1});

    // Star rooted at the center, all leaves open: leaves in index order.
    const auto star = exact::make_graph(4, {{0, 1}, {0, 2}, {0, 3}}, 0);
    SiteConfig all{std::vector<std::uint8_t>(4, 1), 1.0, 0};
    const auto ts = exploration_run(star, all, 0, order);
    CHECK(ts.order == std::vector<std::uint32_t>{1, 2, 3});

    // Path rho-a-b-c with a closed: a revealed first, then b, c unreachable
    // in fixed order.
    const auto path = path_graph(4);
    SiteConfig closed_a{std::vector<std::uint8_t>{1, 0, 1, 1}, 0.5, 0};
    const auto tp = exploration_run(path, closed_a, 0, order);
    CHECK(tp.order == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(tp.states == std::vector<std::uint8_t>{0, 1, 1});

    // With a open the cluster grows along the path.
    SiteConfig open_a{std::vector<std::uint8_t>{1, 1, 0, 1}, 0.5, 0};
    const auto tq = exploration_run(path, open_a, 0, order);
    CHECK(tq.order == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(tq.states == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("exploration is adapted: the next vertex depends only on the prefix") {
    // Enumerate every site configuration of a few small graphs; group by
    // revealed prefix and check the (k+1)-th vertex is constant per group.
    std::vector<RcmGraph> graphs{
        path_graph(5), exact::make_graph(5, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}}, 0),
        exact::make_graph(4, {{0, 2}, {2, 1}, {1, 3}, {0, 3}}, 0)};
    for (const auto& g : graphs) {
        const std::uint32_t m = g.n - 1;
        const auto order = id_order(g.n, 0);
        std::vector<ExplorationTrace> traces;
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            SiteConfig sc;
            sc.p = 0.5;
            sc.root = 0;
            sc.open.assign(g.n, 1);
            for (std::uint32_t i = 0; i < m; ++i) sc.open[i + 1] = (mask >> i) & 1u;
            traces.push_back(exploration_run(g, sc, 0, order));
        }
        for (std::uint32_t k = 0; k < m; ++k) {
            std::map<std::vector<std::uint32_t>, std::uint32_t> next_of;
            for (const auto& t : traces) {
                std::vector<std::uint32_t> key;
                for (std::uint32_t j = 0; j < k; ++j) {
                    key.push_back(t.order[j]);
                    key.push_back(t.states[j]);
                }
                const auto it = next_of.find(key);
                if (it == next_of.end())
                    next_of[key] = t.order[k];
                else
                    CHECK(it->second == t.order[k]);
            }
        }
    }
}

TEST_CASE("exploration events partition the configuration space") {
    // Every omega realizes exactly one full trace; distinct traces have
    // disjoint consistency sets that cover everything.
    const auto g = exact::make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {3, 4}}, 0);
    const auto order = id_order(5, 0);
    std::map<std::vector<std::uint32_t>, int> counts;
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
        SiteConfig sc;
        sc.p = 0.5;
        sc.root = 0;
        sc.open.assign(5, 1);
        for (std::uint32_t i = 0; i < 4; ++i) sc.open[i + 1] = (mask >> i) & 1u;
        const auto t = exploration_run(g, sc, 0, order);
        std::vector<std::uint32_t> key;
        for (std::uint32_t j = 0; j < 4; ++j) {
            key.push_back(t.order[j]);
            key.push_back(t.states[j]);
        }
        counts[key] += 1;
    }
    int total = 0;
    for (const auto& [key, c] : counts) {
        CHECK(c == 1);  // a full trace pins every state
        total += c;
    }
    CHECK(total == 16);
}

TEST_CASE("pivotality flips membership") {
    const auto k2 = exact::make_graph(2, {{0, 1}}, 0);
    SiteConfig sc{std::vector<std::uint8_t>{1, 0}, 0.5, 0};
    GhostField ghost;
    ghost.h = 1.0;

    const EventPredicate always = [](const SiteConfig&, const GhostField&) {
        return true;
    };
    const EventPredicate x_open = [](const SiteConfig& s, const GhostField&) {
        return s.open[1] == 1;
    };
    ghost.green = {0, 1};
    CHECK_FALSE(is_pivotal(sc, ghost, 1, always));
    CHECK(is_pivotal(sc, ghost, 1, x_open));

    // A = {root cluster avoids the ghost}; vertex a green. Pivotal exactly
    // when the root is not green.
    const EventPredicate ghost_free = [&](const SiteConfig& s, const GhostField& gf) {
        const auto comp = explore_cluster(thinned_graph(k2, s, 0).graph, 0, 10);
        // map back to original ids
        const auto thin = thinned_graph(k2, s, 0);
        for (auto v : comp.vertices)
            if (gf.green[thin.original_ids[v]]) return false;
        return true;
    };
    ghost.green = {0, 1};  // a green, root not
    CHECK(is_pivotal(sc, ghost, 1, ghost_free));
    ghost.green = {1, 1};  // root green too: A fails either way
    CHECK_FALSE(is_pivotal(sc, ghost, 1, ghost_free));

    CHECK_THROWS_AS((void)is_pivotal(sc, ghost, 0, always), std::invalid_argument);
}

TEST_CASE("connected_to_green follows the open-path semantics") {
    // x - a - b chain.
    const auto chain = exact::make_graph(3, {{0, 1}, {1, 2}}, std::nullopt);
    GhostField ghost;
    ghost.h = 0.5;

    // x green counts even when x is closed.
    ghost.green = {1, 0, 0};
    CHECK(connected_to_green(chain, std::vector<std::uint8_t>{0, 0, 0}, ghost, 0));

    // No green vertex anywhere.
    ghost.green = {0, 0, 0};
    CHECK_FALSE(connected_to_green(chain, std::vector<std::uint8_t>{1, 1, 1}, ghost, 0));

    // Green endpoint must be open to be reached through the cluster.
    ghost.green = {0, 0, 1};
    CHECK(connected_to_green(chain, std::vector<std::uint8_t>{0, 1, 1}, ghost, 0));
    CHECK_FALSE(connected_to_green(chain, std::vector<std::uint8_t>{0, 1, 0}, ghost, 0));
    // Interior vertex must be open as well.
    CHECK_FALSE(connected_to_green(chain, std::vector<std::uint8_t>{0, 0, 1}, ghost, 0));
}

TEST_CASE("batched connected-to-green agrees with the per-vertex BFS") {
    Stream s(404);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(s.next_below(6));
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (s.next_unit() < 0.4) edges.emplace_back(i, j);
        const auto g = exact::make_graph(n, edges, std::nullopt);
        std::vector<std::uint8_t> open(n);
        GhostField ghost;
        ghost.h = 0.3;
        ghost.green.resize(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            open[v] = s.next_unit() < 0.5 ? 1 : 0;
            ghost.green[v] = s.next_unit() < 0.3 ? 1 : 0;
        }
        const auto batched = connected_to_green_all(g, open, ghost);
        for (std::uint32_t v = 0; v < n; ++v)
            CHECK(batched[v] == (connected_to_green(g, open, ghost, v) ? 1 : 0));
    }
}
