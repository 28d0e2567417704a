// Cubic windows and small vector helpers.
//
// All windows are axis-aligned cubes box(center, side) = center + [-side/2,
// side/2)^d, half-open per coordinate. Points are rows of a flat coordinate
// array owned by whoever stores them; functions take spans.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcm {

struct Box {
    double side = 0.0;
    int dim = 0;
    std::vector<double> center;  // empty means the origin

    static Box cube(double side, int dim) {
        if (!(side >= 0.0) || dim < 1)
            throw std::invalid_argument("Box: side must be >= 0 and dim >= 1");
        return Box{side, dim, {}};
    }

    double center_coord(int axis) const {
        return center.empty() ? 0.0 : center[static_cast<std::size_t>(axis)];
    }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= side;
        return v;
    }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("Box::contains: dimension mismatch");
        for (int a = 0; a < dim; ++a) {
            const double lo = center_coord(a) - side / 2.0;
            if (x[static_cast<std::size_t>(a)] < lo ||
                x[static_cast<std::size_t>(a)] >= lo + side)
                return false;
        }
        return true;
    }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace rcm
