#include "rcm/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcm {

namespace {
constexpr double kZ95 = 1.959963984540054;  // 97.5% normal quantile
}

Estimate Estimate::proportion(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Estimate::proportion: n == 0");
    if (successes > n)
        throw std::invalid_argument("Estimate::proportion: successes > n");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half =
        kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Estimate e;
    e.value = p;
    e.stderr_ = std::sqrt(p * (1.0 - p) / nn);
    // Clamp to [0,1] and keep the point estimate inside against rounding.
    e.ci_lo = std::min(std::max(0.0, center - half), p);
    e.ci_hi = std::max(std::min(1.0, center + half), p);
    e.n = n;
    return e;
}

Estimate Estimate::mean_of(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("Estimate::mean_of: empty");
    const double nn = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / nn;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (nn - 1.0) : 0.0;
    Estimate e;
    e.value = mean;
    e.stderr_ = std::sqrt(var / nn);
    e.ci_lo = mean - kZ95 * e.stderr_;
    e.ci_hi = mean + kZ95 * e.stderr_;
    e.n = values.size();
    return e;
}

namespace {

// Lower incomplete gamma by series, for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double stat, double dof) {
    if (stat <= 0.0) return 1.0;
    return gamma_q(dof / 2.0, stat / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("chi_square_two_sample: size mismatch");
    double na = 0.0, nb = 0.0;
    for (auto v : a) na += static_cast<double>(v);
    for (auto v : b) nb += static_cast<double>(v);
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("chi_square_two_sample: empty sample");
    const double total = na + nb;
    ChiSquareResult r;
    int used = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pooled = static_cast<double>(a[i] + b[i]);
        if (pooled == 0.0) continue;
        ++used;
        const double ea = na * pooled / total;
        const double eb = nb * pooled / total;
        const double da = static_cast<double>(a[i]) - ea;
        const double db = static_cast<double>(b[i]) - eb;
        r.stat += da * da / ea + db * db / eb;
    }
    r.dof = used - 1;
    r.p_value = r.dof > 0 ? chi_square_sf(r.stat, r.dof) : 1.0;
    return r;
}

DecayFit fit_decay(const std::map<int, Estimate>& estimates) {
    // Keep strictly positive values; weight by the delta-method variance of
    // log(p-hat): var(log p) ~ (1-p) / (p * n).
    std::vector<double> xs, ys, ws;
    int lo = 0, hi = 0;
    for (const auto& [n, e] : estimates) {
        if (!(e.value > 0.0)) continue;
        double var_log = (1.0 - e.value) / (e.value * static_cast<double>(e.n));
        if (var_log <= 0.0) var_log = 1.0 / static_cast<double>(e.n);  // p == 1
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(e.value));
        ws.push_back(1.0 / var_log);
        if (xs.size() == 1) lo = n;
        hi = n;
    }
    if (xs.size() < 4)
        throw std::invalid_argument("fit_decay: need at least 4 positive estimates");

    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        swx += ws[i] * xs[i];
        swy += ws[i] * ys[i];
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = intercept + slope * xs[i];
        ss_res += ws[i] * (ys[i] - fit) * (ys[i] - fit);
        ss_tot += ws[i] * (ys[i] - ybar) * (ys[i] - ybar);
    }

    DecayFit f;
    f.rate = -slope;
    f.prefactor = std::exp(intercept);
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    f.rate_stderr = std::sqrt(1.0 / sxx);  // weights are true inverse variances
    f.n_points = xs.size();
    f.n_lo = lo;
    f.n_hi = hi;
    return f;
}

LineFit fit_line_wls(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& variances) {
    if (xs.size() != ys.size() || xs.size() != variances.size() || xs.size() < 2)
        throw std::invalid_argument("fit_line_wls: need >= 2 aligned points");
    double sw = 0.0, swx = 0.0, swy = 0.0;
    std::vector<double> ws(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ws[i] = variances[i] > 0.0 ? 1.0 / variances[i] : 1e12;
        sw += ws[i];
        swx += ws[i] * xs[i];
        swy += ws[i] * ys[i];
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_line_wls: degenerate x values");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    f.slope_stderr = std::sqrt(1.0 / sxx);
    f.intercept_stderr = std::sqrt(1.0 / sw + xbar * xbar / sxx);
    return f;
}

}  // namespace rcm
