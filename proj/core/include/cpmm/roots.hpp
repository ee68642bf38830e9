#ifndef CPMM_ROOTS_HPP
#define CPMM_ROOTS_HPP

#include <functional>
#include <utility>

namespace cpmm {

// Bisection on a bracketing interval; f(lo) and f(hi) must have opposite signs.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

// Locate a sign-change bracket by unit-step integer scan from `start`.
std::pair<double, double> scan_bracket(const std::function<double(double)>& f, double start,
                                       double stop, double step = 1.0);

// Real root of x^3 - 2x^2 - x - 2: the smallest slope whose transition system
// admits a nonnegative eigenvector in the interval gallery example (~2.6590).
double min_slope_root();

// Real root of x^3 - x^2 - x - 1: growth rate of the first-return counts in
// the same example (~1.8393).
double growth_root();

// Positive root of x^2 + (lambda+1)x - lambda.
double recurrence_root_pos(double lambda);

}  // namespace cpmm

#endif
