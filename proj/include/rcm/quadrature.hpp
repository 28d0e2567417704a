// Adaptive Simpson quadrature, used for the Mecke edge-count reference
// integral and as a cross-check on the closed-form connection integrals.
#pragma once

#include <functional>

namespace rcm {

// Integrate f on [a, b] to the given relative tolerance (absolute floor
// abs_floor guards integrals near zero). Handles kinks and jump
// discontinuities by recursive bisection.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_floor = 1e-14);

}  // namespace rcm
