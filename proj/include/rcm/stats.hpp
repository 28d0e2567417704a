// Estimates, intervals and the small set of special functions the library
// needs (regularized incomplete gamma, normal tail, chi-square p-values,
// weighted least squares).
#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace rcm {

// A Monte Carlo estimate with its 95% confidence interval. Proportions use
// Wilson intervals (valid near 0/1); means use normal intervals.
struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t n = 0;

    static Estimate proportion(std::uint64_t successes, std::uint64_t n);
    static Estimate mean_of(const std::vector<double>& values);
};

// Regularized lower/upper incomplete gamma functions P(a,x), Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees.
double chi_square_sf(double stat, double dof);

// Standard normal survival function P(Z > z).
double normal_sf(double z);

// Two-sample chi-square homogeneity test on aligned count vectors. Bins with
// zero pooled count are dropped; dof = (#used bins - 1).
struct ChiSquareResult {
    double stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b);

// Exponential-decay fit psi_n ~ C exp(-c n).
struct DecayFit {
    double rate = 0.0;       // c
    double prefactor = 0.0;  // C
    double r_squared = 0.0;
    double rate_stderr = 0.0;
    std::size_t n_points = 0;
    int n_lo = 0;
    int n_hi = 0;
};

// Weighted least squares of log(value) against n, weights from the delta
// method (inverse variance of the log-transformed proportion). Uses only
// entries with value > 0; at least 4 required.
DecayFit fit_decay(const std::map<int, Estimate>& estimates);

// Straight-line weighted least squares y ~ intercept + slope * x with known
// per-point variances (standard errors follow from the weights).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
};
LineFit fit_line_wls(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& variances);

}  // namespace rcm
