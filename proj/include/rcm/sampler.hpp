// Poisson sampling and RCM graph construction.
//
// A PointSample is a seeded Poisson configuration in a cubic window, with
// dense integer ids and an optional root point appended last (the root id is
// the highest id). Graphs are built by comparing one keyed uniform per
// unordered pair against a connection form; because the uniforms are keyed
// rather than sequential, several forms can be compared against the same
// uniforms to produce exactly coupled graphs, and dense / cell-list builds
// agree edge for edge.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/geometry.hpp"
#include "rcm/lattice.hpp"
#include "rcm/rng.hpp"

namespace rcm {

struct PointSample {
    Box window;
    double intensity = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> coords;  // row-major, n x dim
    bool has_root = false;

    int dim() const { return window.dim; }
    std::uint32_t size() const {
        return static_cast<std::uint32_t>(coords.size() / static_cast<std::size_t>(window.dim));
    }
    std::span<const double> position(std::uint32_t id) const {
        return {coords.data() + static_cast<std::size_t>(id) * static_cast<std::size_t>(window.dim),
                static_cast<std::size_t>(window.dim)};
    }
    std::uint32_t root_id() const;  // valid only when has_root
};

// n ~ Poisson(lambda * |window|), then n independent uniform positions.
// Deterministic given the seed.
PointSample sample_poisson(double lambda, const Box& window, std::uint64_t seed);

// Append x under the reserved (last) id. Rejects a second root or x outside
// the window.
PointSample add_root(const PointSample& sample, std::span<const double> x);

struct RcmGraph {
    std::uint32_t n = 0;
    std::vector<std::vector<std::uint32_t>> adj;  // sorted neighbor lists
    std::optional<std::uint32_t> root;
    std::string g_tag;

    std::uint64_t edge_count() const;
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
};

enum class BuildStrategy { dense, cell_list };

// What the pair uniform is compared against: the connection function itself,
// or its box-supremum discretization over a lattice.
struct EdgeForm {
    const ConnectionFunction* g = nullptr;
    bool box_supremum = false;
};

// Per-point (box, occurrence) labels for tensor keying: points inside each
// lattice box are ranked in lexicographic coordinate order.
std::vector<std::pair<std::uint64_t, std::uint64_t>> tensor_labels(
    const PointSample& sample, const BoxLattice& lat);

// Build one graph. The lattice is required for box-supremum forms and for
// tensor-keyed sources; cell_list additionally requires bounded reach.
RcmGraph build_graph(const PointSample& sample, const EdgeForm& form,
                     const PairUniformSource& src, BuildStrategy strategy,
                     const BoxLattice* lat = nullptr);

RcmGraph build_graph(const PointSample& sample, const ConnectionFunction& g,
                     const PairUniformSource& src, BuildStrategy strategy,
                     const BoxLattice* lat = nullptr);

// Build one graph per form against shared pair uniforms (dense scan).
// Pointwise-ordered forms yield nested edge sets on every seed.
std::vector<RcmGraph> build_coupled(const PointSample& sample,
                                    const std::vector<EdgeForm>& forms,
                                    const PairUniformSource& src,
                                    const BoxLattice* lat = nullptr);

// Graph on the lattice boxes: vertices are occupied boxes, edges are box
// pairs joined by at least one point pair; self-loops are discarded.
struct QuotientGraph {
    std::vector<std::uint64_t> vertices;                       // sorted box ids
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // a < b, sorted
};
QuotientGraph quotient_graph(const RcmGraph& graph, const PointSample& sample,
                             const BoxLattice& lat);

// Breadth-first closure of root, halting as soon as `cap` vertices are
// found; censored reports the halt ("size >= cap").
struct ClusterResult {
    std::vector<std::uint32_t> vertices;
    bool censored = false;

    std::uint32_t size() const { return static_cast<std::uint32_t>(vertices.size()); }
};
ClusterResult explore_cluster(const RcmGraph& graph, std::uint32_t root,
                              std::uint32_t cap);

// CSV serialization (documented in the README): points.csv has id,x1..xd and
// optional site/ghost bit columns; edges.csv has id_a,id_b.
void write_points_csv(const std::string& path, const PointSample& sample,
                      const std::vector<std::uint8_t>* site_bits = nullptr,
                      const std::vector<std::uint8_t>* ghost_bits = nullptr);
void write_edges_csv(const std::string& path, const RcmGraph& graph);

}  // namespace rcm
