#include "rcm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rcm/cell_grid.hpp"
#include "rcm/csv.hpp"

namespace rcm {

std::uint32_t PointSample::root_id() const {
    if (!has_root) throw std::logic_error("PointSample: no root present");
    return size() - 1;
}

PointSample sample_poisson(double lambda, const Box& window, std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_poisson: lambda must be > 0");
    const double vol = window.volume();
    if (!(vol > 0.0)) throw std::invalid_argument("sample_poisson: degenerate window");

    PointSample s;
    s.window = window;
    s.intensity = lambda;
    s.seed = seed;

    Stream stream(derive_seed(seed, "points"));
    const std::uint64_t n = poisson_draw(stream, lambda * vol);
    s.coords.reserve(n * static_cast<std::uint64_t>(window.dim));
    for (std::uint64_t i = 0; i < n; ++i) {
        for (int a = 0; a < window.dim; ++a) {
            const double lo = window.center_coord(a) - window.side / 2.0;
            s.coords.push_back(stream.next_in(lo, lo + window.side));
        }
    }
    return s;
}

PointSample add_root(const PointSample& sample, std::span<const double> x) {
    if (sample.has_root) throw std::invalid_argument("add_root: root already present");
    if (!sample.window.contains(x))
        throw std::invalid_argument("add_root: point outside window");
    PointSample out = sample;
    out.coords.insert(out.coords.end(), x.begin(), x.end());
    out.has_root = true;
    return out;
}

std::uint64_t RcmGraph::edge_count() const {
    std::uint64_t twice = 0;
    for (const auto& nb : adj) twice += nb.size();
    return twice / 2;
}

bool RcmGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
    const auto& nb = adj[a];
    return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> tensor_labels(
    const PointSample& sample, const BoxLattice& lat) {
    const std::uint32_t n = sample.size();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> labels(n);
    // Group point ids by box, then rank within each box in lexicographic
    // coordinate order.
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    std::vector<std::uint64_t> box(n);
    for (std::uint32_t i = 0; i < n; ++i) box[i] = lat.assign(sample.position(i));
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (box[a] != box[b]) return box[a] < box[b];
        const auto pa = sample.position(a);
        const auto pb = sample.position(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    });
    std::uint64_t rank = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
        if (k > 0 && box[ids[k]] != box[ids[k - 1]]) rank = 0;
        labels[ids[k]] = {box[ids[k]], rank++};
    }
    return labels;
}

namespace {

struct EdgeContext {
    const PointSample& sample;
    const PairUniformSource& src;
    const BoxLattice* lat;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> labels;  // tensor keying
    std::vector<std::uint64_t> box_of;                            // box-sup forms

    EdgeContext(const PointSample& s, const PairUniformSource& u, const BoxLattice* l,
                bool need_boxes)
        : sample(s), src(u), lat(l) {
        if (src.keying() == PairUniformSource::Keying::by_box_tensor) {
            if (!lat)
                throw std::invalid_argument("build_graph: tensor keying needs a lattice");
            labels = tensor_labels(s, *lat);
        }
        if (need_boxes) {
            if (!lat)
                throw std::invalid_argument("build_graph: box-supremum form needs a lattice");
            box_of.resize(s.size());
            for (std::uint32_t i = 0; i < s.size(); ++i)
                box_of[i] = lat->assign(s.position(i));
        }
    }

    double uniform(std::uint32_t i, std::uint32_t j) const {
        if (src.keying() == PairUniformSource::Keying::by_box_tensor)
            return src.by_tensor(labels[i].first, labels[i].second, labels[j].first,
                                 labels[j].second);
        return src.by_ids(i, j);
    }

    double threshold(const EdgeForm& form, std::uint32_t i, std::uint32_t j) const {
        if (form.box_supremum) return g_hat(*form.g, *lat, box_of[i], box_of[j]);
        return form.g->profile(distance(sample.position(i), sample.position(j)));
    }
};

void add_edge(RcmGraph& g, std::uint32_t a, std::uint32_t b) {
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
}

void sort_adjacency(RcmGraph& g) {
    for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
}

double effective_reach(const EdgeForm& form, const BoxLattice* lat) {
    double r = form.g->support_radius();
    if (form.box_supremum) {
        // g_hat is positive whenever the minimum box distance is within
        // support; actual point separation can exceed it by two box
        // diagonals.
        r += 2.0 * std::sqrt(static_cast<double>(lat->dim())) * lat->box_side();
    }
    return r;
}

}  // namespace

RcmGraph build_graph(const PointSample& sample, const EdgeForm& form,
                     const PairUniformSource& src, BuildStrategy strategy,
                     const BoxLattice* lat) {
    if (!form.g) throw std::invalid_argument("build_graph: null connection function");
    if (form.g->dim() != sample.dim())
        throw std::invalid_argument("build_graph: dimension mismatch");
    EdgeContext ctx(sample, src, lat, form.box_supremum);

    RcmGraph graph;
    graph.n = sample.size();
    graph.adj.resize(graph.n);
    if (sample.has_root) graph.root = sample.root_id();
    graph.g_tag = form.g->tag() + (form.box_supremum ? "|box-sup" : "");

    auto try_edge = [&](std::uint32_t i, std::uint32_t j) {
        const double t = ctx.threshold(form, i, j);
        if (t > 0.0 && ctx.uniform(i, j) < t) add_edge(graph, i, j);
    };

    if (strategy == BuildStrategy::dense) {
        for (std::uint32_t i = 0; i < graph.n; ++i)
            for (std::uint32_t j = i + 1; j < graph.n; ++j) try_edge(i, j);
    } else {
        if (!form.g->bounded_support())
            throw std::invalid_argument("build_graph: cell_list requires bounded support");
        if (form.box_supremum && !lat)
            throw std::invalid_argument("build_graph: box-supremum form needs a lattice");
        CellGrid grid(sample, effective_reach(form, lat));
        for (std::size_t c = 0; c < grid.cells.size(); ++c) {
            if (grid.cells[c].empty()) continue;
            grid.for_half_neighbors(c, [&](std::size_t c2) {
                const auto& pa = grid.cells[c];
                const auto& pb = grid.cells[c2];
                if (c == c2) {
                    for (std::size_t u = 0; u < pa.size(); ++u)
                        for (std::size_t v = u + 1; v < pa.size(); ++v)
                            try_edge(pa[u], pa[v]);
                } else {
                    for (std::uint32_t u : pa)
                        for (std::uint32_t v : pb) try_edge(u, v);
                }
            });
        }
    }
    sort_adjacency(graph);
    return graph;
}

RcmGraph build_graph(const PointSample& sample, const ConnectionFunction& g,
                     const PairUniformSource& src, BuildStrategy strategy,
                     const BoxLattice* lat) {
    return build_graph(sample, EdgeForm{&g, false}, src, strategy, lat);
}

std::vector<RcmGraph> build_coupled(const PointSample& sample,
                                    const std::vector<EdgeForm>& forms,
                                    const PairUniformSource& src,
                                    const BoxLattice* lat) {
    if (forms.empty()) throw std::invalid_argument("build_coupled: no forms");
    bool need_boxes = false;
    for (const auto& f : forms) {
        if (!f.g) throw std::invalid_argument("build_coupled: null connection function");
        if (f.g->dim() != sample.dim())
            throw std::invalid_argument("build_coupled: dimension mismatch");
        need_boxes = need_boxes || f.box_supremum;
    }
    EdgeContext ctx(sample, src, lat, need_boxes);

    std::vector<RcmGraph> graphs(forms.size());
    for (std::size_t k = 0; k < forms.size(); ++k) {
        graphs[k].n = sample.size();
        graphs[k].adj.resize(sample.size());
        if (sample.has_root) graphs[k].root = sample.root_id();
        graphs[k].g_tag = forms[k].g->tag() + (forms[k].box_supremum ? "|box-sup" : "");
    }
    // One uniform per unordered pair, compared against every form.
    for (std::uint32_t i = 0; i < sample.size(); ++i)
        for (std::uint32_t j = i + 1; j < sample.size(); ++j) {
            double u = -1.0;
            for (std::size_t k = 0; k < forms.size(); ++k) {
                const double t = ctx.threshold(forms[k], i, j);
                if (t <= 0.0) continue;
                if (u < 0.0) u = ctx.uniform(i, j);
                if (u < t) add_edge(graphs[k], i, j);
            }
        }
    for (auto& g : graphs) sort_adjacency(g);
    return graphs;
}

QuotientGraph quotient_graph(const RcmGraph& graph, const PointSample& sample,
                             const BoxLattice& lat) {
    if (graph.n != sample.size())
        throw std::invalid_argument("quotient_graph: graph/sample mismatch");
    std::vector<std::uint64_t> box(graph.n);
    for (std::uint32_t i = 0; i < graph.n; ++i) box[i] = lat.assign(sample.position(i));

    QuotientGraph q;
    q.vertices = box;
    std::sort(q.vertices.begin(), q.vertices.end());
    q.vertices.erase(std::unique(q.vertices.begin(), q.vertices.end()), q.vertices.end());

    for (std::uint32_t i = 0; i < graph.n; ++i)
        for (std::uint32_t j : graph.adj[i]) {
            if (j <= i) continue;
            if (box[i] == box[j]) continue;  // self-loop
            q.edges.emplace_back(std::min(box[i], box[j]), std::max(box[i], box[j]));
        }
    std::sort(q.edges.begin(), q.edges.end());
    q.edges.erase(std::unique(q.edges.begin(), q.edges.end()), q.edges.end());
    return q;
}

ClusterResult explore_cluster(const RcmGraph& graph, std::uint32_t root,
                              std::uint32_t cap) {
    if (root >= graph.n) throw std::invalid_argument("explore_cluster: missing root");
    if (cap == 0) throw std::invalid_argument("explore_cluster: cap must be >= 1");
    ClusterResult r;
    std::vector<std::uint8_t> seen(graph.n, 0);
    seen[root] = 1;
    r.vertices.push_back(root);
    std::size_t head = 0;
    while (head < r.vertices.size()) {
        const std::uint32_t v = r.vertices[head++];
        for (std::uint32_t w : graph.adj[v]) {
            if (seen[w]) continue;
            if (r.vertices.size() == cap) {
                r.censored = true;
                return r;
            }
            seen[w] = 1;
            r.vertices.push_back(w);
        }
    }
    return r;
}

void write_points_csv(const std::string& path, const PointSample& sample,
                      const std::vector<std::uint8_t>* site_bits,
                      const std::vector<std::uint8_t>* ghost_bits) {
    CsvWriter w;
    std::vector<std::string> header{"id"};
    for (int a = 1; a <= sample.dim(); ++a) header.push_back("x" + std::to_string(a));
    if (site_bits) header.push_back("site");
    if (ghost_bits) header.push_back("ghost");
    w.set_header(header);
    for (std::uint32_t i = 0; i < sample.size(); ++i) {
        w.begin_row();
        w.add(i);
        for (double c : sample.position(i)) w.add(c);
        if (site_bits) w.add(static_cast<std::uint64_t>((*site_bits)[i]));
        if (ghost_bits) w.add(static_cast<std::uint64_t>((*ghost_bits)[i]));
    }
    w.write_atomic(path);
}

void write_edges_csv(const std::string& path, const RcmGraph& graph) {
    CsvWriter w;
    w.set_header({"id_a", "id_b"});
    for (std::uint32_t i = 0; i < graph.n; ++i)
        for (std::uint32_t j : graph.adj[i])
            if (i < j) {
                w.begin_row();
                w.add(i);
                w.add(j);
            }
    w.write_atomic(path);
}

}  // namespace rcm
