// Site percolation on rooted graphs, ghost fields, the cluster-first
// exploration, pivotality, and the thinning construction that rebuilds a
// low-intensity RCM from a high-intensity one.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rcm/sampler.hpp"

namespace rcm {

// Open/closed state per vertex. The root, when present, is always open.
struct SiteConfig {
    std::vector<std::uint8_t> open;
    double p = 0.0;
    std::optional<std::uint32_t> root;
};

// Green marks on all vertices, root included.
struct GhostField {
    std::vector<std::uint8_t> green;
    double h = 0.0;
};

// Independent Bernoulli(p) bits keyed by (seed, vertex id), no special
// vertex.
std::vector<std::uint8_t> bernoulli_bits(std::uint32_t n, double p, std::uint64_t seed);

// Independent Bernoulli(p) bits on non-root vertices, root forced open.
// Bits are keyed by vertex id, so they are stable per (seed, id).
SiteConfig sample_site_config(const RcmGraph& graph, std::uint32_t root, double p,
                              std::uint64_t seed);
SiteConfig sample_site_config(std::uint32_t n_vertices, std::uint32_t root, double p,
                              std::uint64_t seed);

// Independent Bernoulli(1 - e^{-h}) marks on n vertices.
GhostField sample_ghost(std::uint32_t n_vertices, double h, std::uint64_t seed);

// Induced subgraph on the open vertices plus the root, with compact ids.
struct ThinnedGraph {
    RcmGraph graph;
    std::vector<std::uint32_t> original_ids;  // new id -> old id
    std::uint32_t root = 0;                   // new id of the root
};
ThinnedGraph thinned_graph(const RcmGraph& graph, const SiteConfig& sites,
                           std::uint32_t root);

// Sample eta at intensity N*lambda with the origin as root, percolate at
// parameter 1/N, and return everything. The thinned graph is distributed as
// the intensity-lambda rooted RCM.
struct ThinningResult {
    PointSample sample;
    RcmGraph dense;
    SiteConfig sites;
    ThinnedGraph thinned;
};
ThinningResult thinning_construction(double lambda, int n_factor,
                                     const ConnectionFunction& g, const Box& window,
                                     std::uint64_t seed);

// Cluster-first exploration: repeatedly reveal the first (by fixed_order)
// unrevealed vertex adjacent to the current open cluster of the root; when
// none remain, reveal the rest in fixed_order. Step k+1 depends only on the
// first k revealed states.
struct ExplorationTrace {
    std::vector<std::uint32_t> order;   // non-root vertices, reveal order
    std::vector<std::uint8_t> states;   // their open bits, same order
};
ExplorationTrace exploration_run(const RcmGraph& graph, const SiteConfig& sites,
                                 std::uint32_t root,
                                 const std::vector<std::uint32_t>& fixed_order);

// Identity permutation of the non-root vertices (the default fixed order).
std::vector<std::uint32_t> id_order(std::uint32_t n, std::uint32_t root);

// A vertex is pivotal when flipping its state changes membership of
// (omega, ghost) in the event, all else fixed.
using EventPredicate = std::function<bool(const SiteConfig&, const GhostField&)>;
bool is_pivotal(const SiteConfig& sites, const GhostField& ghost, std::uint32_t x,
                const EventPredicate& event);

// True iff x is green, or some open green vertex is reachable from x through
// open vertices (x itself does not need to be open).
bool connected_to_green(const RcmGraph& graph, const std::vector<std::uint8_t>& open,
                        const GhostField& ghost, std::uint32_t x);
bool connected_to_green(const RcmGraph& graph, const SiteConfig& sites,
                        const GhostField& ghost, std::uint32_t x);

// The same predicate for every vertex at once (one component pass instead of
// one BFS per vertex).
std::vector<std::uint8_t> connected_to_green_all(const RcmGraph& graph,
                                                 const std::vector<std::uint8_t>& open,
                                                 const GhostField& ghost);

}  // namespace rcm
