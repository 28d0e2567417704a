// Fixed-radius neighbor search over a point sample: a uniform grid of cells
// with side >= reach, so any pair within reach lies in the same or adjacent
// cells. Shared by the graph builder and the lazy cluster explorers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rcm/sampler.hpp"

namespace rcm {

struct CellGrid {
    int dim;
    int per_axis;
    double cell_side;
    std::vector<double> lo;
    std::vector<std::vector<std::uint32_t>> cells;

    CellGrid(const PointSample& sample, double reach) : dim(sample.dim()) {
        const double L = sample.window.side;
        per_axis = (!(reach > 0.0) || reach >= L)
                       ? 1
                       : static_cast<int>(std::floor(L / reach));
        per_axis = std::clamp(per_axis, 1, 128);
        cell_side = L / per_axis;
        lo.resize(static_cast<std::size_t>(dim));
        for (int a = 0; a < dim; ++a)
            lo[static_cast<std::size_t>(a)] = sample.window.center_coord(a) - L / 2.0;
        std::size_t n_cells = 1;
        for (int a = 0; a < dim; ++a) n_cells *= static_cast<std::size_t>(per_axis);
        cells.resize(n_cells);
        for (std::uint32_t i = 0; i < sample.size(); ++i)
            cells[cell_of(sample.position(i))].push_back(i);
    }

    std::size_t cell_of(std::span<const double> x) const {
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a) {
            auto i = static_cast<std::int64_t>(
                (x[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) /
                cell_side);
            i = std::clamp<std::int64_t>(i, 0, per_axis - 1);
            idx = idx * static_cast<std::size_t>(per_axis) + static_cast<std::size_t>(i);
        }
        return idx;
    }

    void decode(std::size_t idx, std::vector<int>& out) const {
        out.assign(static_cast<std::size_t>(dim), 0);
        for (int a = dim - 1; a >= 0; --a) {
            out[static_cast<std::size_t>(a)] = static_cast<int>(idx % per_axis);
            idx /= static_cast<std::size_t>(per_axis);
        }
    }

    // Visit all cells adjacent to idx (idx included).
    template <typename Fn>
    void for_neighbors(std::size_t idx, Fn&& fn) const {
        std::vector<int> base;
        decode(idx, base);
        visit_offsets(base, [&](std::size_t nb) { fn(nb); });
    }

    // Visit adjacent cells with linear index >= idx, so each unordered cell
    // pair is seen exactly once.
    template <typename Fn>
    void for_half_neighbors(std::size_t idx, Fn&& fn) const {
        std::vector<int> base;
        decode(idx, base);
        visit_offsets(base, [&](std::size_t nb) {
            if (nb >= idx) fn(nb);
        });
    }

  private:
    template <typename Fn>
    void visit_offsets(const std::vector<int>& base, Fn&& fn) const {
        std::vector<int> off(static_cast<std::size_t>(dim), -1);
        while (true) {
            std::size_t nb = 0;
            bool ok = true;
            for (int a = 0; a < dim && ok; ++a) {
                const int c =
                    base[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
                if (c < 0 || c >= per_axis) ok = false;
                nb = nb * static_cast<std::size_t>(per_axis) +
                     static_cast<std::size_t>(std::max(c, 0));
            }
            if (ok) fn(nb);
            int a = dim - 1;
            while (a >= 0 && off[static_cast<std::size_t>(a)] == 1) {
                off[static_cast<std::size_t>(a)] = -1;
                --a;
            }
            if (a < 0) break;
            ++off[static_cast<std::size_t>(a)];
        }
    }
};

}  // namespace rcm
