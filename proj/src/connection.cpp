#include "rcm/connection.hpp"

#include <cmath>
#include <stdexcept>

#include "rcm/geometry.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

void check_dim(int dim) {
    if (dim < 1) throw std::invalid_argument("ConnectionFunction: dim must be >= 1");
}

}  // namespace

ConnectionFunction ConnectionFunction::indicator(double radius, int dim) {
    check_dim(dim);
    if (!(radius > 0.0)) throw std::invalid_argument("indicator: radius must be > 0");
    ConnectionFunction g;
    g.family_ = Family::indicator;
    g.dim_ = dim;
    g.param_ = radius;
    return g;
}

ConnectionFunction ConnectionFunction::exponential(double beta, int dim) {
    check_dim(dim);
    if (!(beta > 0.0)) throw std::invalid_argument("exponential: beta must be > 0");
    ConnectionFunction g;
    g.family_ = Family::exponential;
    g.dim_ = dim;
    g.param_ = beta;
    return g;
}

ConnectionFunction ConnectionFunction::power_law(double alpha, int dim) {
    check_dim(dim);
    // alpha <= d makes the integral diverge.
    if (!(alpha > static_cast<double>(dim)))
        throw std::invalid_argument("power_law: alpha must exceed the dimension");
    ConnectionFunction g;
    g.family_ = Family::power_law;
    g.dim_ = dim;
    g.param_ = alpha;
    return g;
}

ConnectionFunction ConnectionFunction::table(
    std::vector<std::pair<double, double>> rows, int dim) {
    check_dim(dim);
    if (rows.size() < 2)
        throw std::invalid_argument("table: need at least two rows");
    double prev_r = 0.0;
    double prev_v = 1.0 + 1e-12;
    for (const auto& [r, v] : rows) {
        if (!(r > prev_r)) throw std::invalid_argument("table: radii must increase");
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("table: values must lie in [0,1]");
        if (v > prev_v + 1e-12)
            throw std::invalid_argument("table: values must be non-increasing");
        prev_r = r;
        prev_v = v;
    }
    if (rows.back().second != 0.0)
        throw std::invalid_argument("table: final value must be 0");
    if (!(rows.front().second > 0.0))
        throw std::invalid_argument("table: integral would be 0");
    ConnectionFunction g;
    g.family_ = Family::table;
    g.dim_ = dim;
    g.rows_ = std::move(rows);
    return g;
}

double ConnectionFunction::base_profile(double r) const {
    switch (family_) {
        case Family::indicator:
            return r <= param_ ? 1.0 : 0.0;
        case Family::exponential:
            return std::exp(-r / param_);
        case Family::power_law:
            return r <= 1.0 ? 1.0 : std::pow(r, -param_);
        case Family::table: {
            // value v_j on (r_{j-1}, r_j]; profile(0) = first value.
            for (const auto& [rad, val] : rows_)
                if (r <= rad) return val;
            return 0.0;
        }
    }
    return 0.0;
}

double ConnectionFunction::profile(double r) const {
    if (!(r >= 0.0)) throw std::invalid_argument("profile: r must be >= 0");
    if (r > cutoff_) return 0.0;
    return base_profile(r);
}

double ConnectionFunction::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("evaluate: dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("evaluate: non-finite coordinate");
    return profile(norm(x));
}

double ConnectionFunction::support_radius() const {
    double intrinsic;
    switch (family_) {
        case Family::indicator:
            intrinsic = param_;
            break;
        case Family::table: {
            intrinsic = 0.0;
            for (const auto& [rad, val] : rows_)
                if (val > 0.0) intrinsic = rad;
            break;
        }
        default:
            intrinsic = std::numeric_limits<double>::infinity();
    }
    return std::min(intrinsic, cutoff_);
}

std::string ConnectionFunction::tag() const {
    switch (family_) {
        case Family::indicator:
            return "indicator(R=" + std::to_string(param_) + ")" +
                   (std::isfinite(cutoff_) ? "|cut=" + std::to_string(cutoff_) : "");
        case Family::exponential:
            return "exponential(beta=" + std::to_string(param_) + ")" +
                   (std::isfinite(cutoff_) ? "|cut=" + std::to_string(cutoff_) : "");
        case Family::power_law:
            return "power-law(alpha=" + std::to_string(param_) + ")" +
                   (std::isfinite(cutoff_) ? "|cut=" + std::to_string(cutoff_) : "");
        case Family::table:
            return "table(" + std::to_string(rows_.size()) + " rows)" +
                   (std::isfinite(cutoff_) ? "|cut=" + std::to_string(cutoff_) : "");
    }
    return "?";
}

ConnectionFunction cutoff(const ConnectionFunction& g, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("cutoff: radius must be > 0");
    ConnectionFunction out = g;
    out.cutoff_ = std::min(g.cutoff_, radius);
    return out;
}

double unit_ball_volume(int dim) {
    check_dim(dim);
    return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double integral(const ConnectionFunction& g) {
    const int d = g.dim();
    const double theta = unit_ball_volume(d);
    const double c = g.cutoff_radius();
    switch (g.family()) {
        case ConnectionFunction::Family::indicator: {
            const double r = std::min(g.param(), c);
            return theta * std::pow(r, d);
        }
        case ConnectionFunction::Family::exponential: {
            // d*theta * int_0^c r^{d-1} e^{-r/beta} dr = theta * beta^d * d! * P(d, c/beta)
            const double beta = g.param();
            const double p = std::isfinite(c) ? gamma_p(d, c / beta) : 1.0;
            return theta * std::pow(beta, d) * std::tgamma(d + 1.0) * p;
        }
        case ConnectionFunction::Family::power_law: {
            const double alpha = g.param();
            if (c <= 1.0) return theta * std::pow(c, d);
            const double tail =
                std::isfinite(c)
                    ? (1.0 - std::pow(c, static_cast<double>(d) - alpha)) /
                          (alpha - static_cast<double>(d))
                    : 1.0 / (alpha - static_cast<double>(d));
            return theta * (1.0 + static_cast<double>(d) * tail);
        }
        case ConnectionFunction::Family::table: {
            // Piecewise-constant: exact shell volumes.
            double total = 0.0;
            double prev = 0.0;
            for (const auto& [rad, val] : g.rows()) {
                const double hi = std::min(rad, c);
                if (hi > prev && val > 0.0)
                    total += val * theta * (std::pow(hi, d) - std::pow(prev, d));
                prev = rad;
                if (prev >= c) break;
            }
            return total;
        }
    }
    return 0.0;
}

}  // namespace rcm
