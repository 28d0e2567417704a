// Radial connection functions.
//
// A connection function maps a displacement x in R^d to an edge probability
// g(x) = profile(|x|), with profile non-increasing and 0 < integral(g) <
// infinity. Built-in families:
//
//   indicator(R)      1 on [0, R], 0 beyond
//   exponential(beta) exp(-r/beta)
//   power_law(alpha)  min(1, r^-alpha), alpha > d
//   table             non-increasing step function from (radius, value) rows,
//                     value v_j on (r_{j-1}, r_j], last value 0
//
// A radial cutoff can be applied on top of any family: the cut function
// agrees with the base on r <= R and vanishes beyond.
#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcm {

class ConnectionFunction {
  public:
    enum class Family { indicator, exponential, power_law, table };

    static ConnectionFunction indicator(double radius, int dim);
    static ConnectionFunction exponential(double beta, int dim);
    static ConnectionFunction power_law(double alpha, int dim);
    // rows: (radius, value), radii strictly increasing, values in [0,1]
    // non-increasing, final value exactly 0.
    static ConnectionFunction table(std::vector<std::pair<double, double>> rows,
                                    int dim);

    Family family() const { return family_; }
    int dim() const { return dim_; }
    double param() const { return param_; }
    const std::vector<std::pair<double, double>>& rows() const { return rows_; }
    double cutoff_radius() const { return cutoff_; }

    // Largest radius with positive value (may be +infinity).
    double support_radius() const;
    bool bounded_support() const {
        return support_radius() < std::numeric_limits<double>::infinity();
    }

    // profile(r) for r >= 0.
    double profile(double r) const;

    // g(x) = profile(|x|); x must have dimension d.
    double evaluate(std::span<const double> x) const;

    // Short human-readable tag for manifests and graph provenance.
    std::string tag() const;

  private:
    Family family_;
    int dim_ = 0;
    double param_ = 0.0;  // radius / beta / alpha
    double cutoff_ = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> rows_;

    friend ConnectionFunction cutoff(const ConnectionFunction& g, double radius);
    double base_profile(double r) const;
};

// g^R: agree with g on |x| <= R, zero beyond. R > 0 required.
ConnectionFunction cutoff(const ConnectionFunction& g, double radius);

// Volume of the d-dimensional unit ball.
double unit_ball_volume(int dim);

// integral over R^d: d * theta_d * int_0^inf r^{d-1} profile(r) dr.
// Closed form for every family (cutoffs included); piecewise-exact for tables.
double integral(const ConnectionFunction& g);

}  // namespace rcm
