// The discretization lattice: a window side K split into (K/s)^d boxes of
// side s. Per-axis centers are -K/2 + s(i + 1/2); the boxes partition the
// cube exactly for every integer K/s. Linear indices are row-major, which
// coincides with lexicographic order of the center coordinates.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcm/connection.hpp"

namespace rcm {

class BoxLattice {
  public:
    // Requires K > 0, s > 0 and K/s integral.
    BoxLattice(double window_side, double box_side, int dim);

    double window_side() const { return window_side_; }
    double box_side() const { return box_side_; }
    int dim() const { return dim_; }
    int per_axis() const { return per_axis_; }
    std::uint64_t n_boxes() const { return n_boxes_; }

    // Center coordinates of a box, by linear index.
    std::vector<double> center(std::uint64_t index) const;

    // The unique box whose half-open cube contains x; x must lie in the
    // window.
    std::uint64_t assign(std::span<const double> x) const;

    // Minimum distance between the closed boxes with the given indices
    // (0 when they coincide or touch).
    double min_box_distance(std::uint64_t a, std::uint64_t b) const;

  private:
    double window_side_;
    double box_side_;
    int dim_;
    int per_axis_;
    std::uint64_t n_boxes_;

    void check_index(std::uint64_t index) const;
};

// Box-supremum discretization of g on the lattice: for radial non-increasing
// profiles the supremum of g(p - q) over p, q in the two closed boxes is the
// profile at the minimum inter-box distance.
double g_hat(const ConnectionFunction& g, const BoxLattice& lat, std::uint64_t box_a,
             std::uint64_t box_b);

}  // namespace rcm
