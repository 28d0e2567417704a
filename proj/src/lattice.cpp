#include "rcm/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace rcm {

BoxLattice::BoxLattice(double window_side, double box_side, int dim)
    : window_side_(window_side), box_side_(box_side), dim_(dim) {
    if (!(window_side > 0.0) || !(box_side > 0.0) || dim < 1)
        throw std::invalid_argument("BoxLattice: K, s must be > 0 and dim >= 1");
    const double ratio = window_side / box_side;
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("BoxLattice: K/s must be an integer");
    per_axis_ = static_cast<int>(rounded);
    n_boxes_ = 1;
    for (int a = 0; a < dim_; ++a) n_boxes_ *= static_cast<std::uint64_t>(per_axis_);
}

void BoxLattice::check_index(std::uint64_t index) const {
    if (index >= n_boxes_) throw std::invalid_argument("BoxLattice: index out of range");
}

std::vector<double> BoxLattice::center(std::uint64_t index) const {
    check_index(index);
    std::vector<double> c(static_cast<std::size_t>(dim_));
    for (int a = dim_ - 1; a >= 0; --a) {
        const std::uint64_t i = index % static_cast<std::uint64_t>(per_axis_);
        index /= static_cast<std::uint64_t>(per_axis_);
        c[static_cast<std::size_t>(a)] =
            -window_side_ / 2.0 + box_side_ * (static_cast<double>(i) + 0.5);
    }
    return c;
}

std::uint64_t BoxLattice::assign(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("BoxLattice::assign: dimension mismatch");
    std::uint64_t index = 0;
    for (int a = 0; a < dim_; ++a) {
        const double xa = x[static_cast<std::size_t>(a)];
        if (xa < -window_side_ / 2.0 || xa >= window_side_ / 2.0)
            throw std::invalid_argument("BoxLattice::assign: point outside window");
        auto i = static_cast<std::int64_t>(
            std::floor((xa + window_side_ / 2.0) / box_side_));
        // Clamp guards the floating-point edge at the upper window face.
        if (i < 0) i = 0;
        if (i >= per_axis_) i = per_axis_ - 1;
        index = index * static_cast<std::uint64_t>(per_axis_) +
                static_cast<std::uint64_t>(i);
    }
    return index;
}

double BoxLattice::min_box_distance(std::uint64_t a, std::uint64_t b) const {
    check_index(a);
    check_index(b);
    const auto ca = center(a);
    const auto cb = center(b);
    double sq = 0.0;
    for (int ax = 0; ax < dim_; ++ax) {
        const double gap =
            std::fabs(ca[static_cast<std::size_t>(ax)] - cb[static_cast<std::size_t>(ax)]) -
            box_side_;
        if (gap > 0.0) sq += gap * gap;
    }
    return std::sqrt(sq);
}

double g_hat(const ConnectionFunction& g, const BoxLattice& lat, std::uint64_t box_a,
             std::uint64_t box_b) {
    if (g.dim() != lat.dim())
        throw std::invalid_argument("g_hat: dimension mismatch");
    return g.profile(lat.min_box_distance(box_a, box_b));
}

}  // namespace rcm
