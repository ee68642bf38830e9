#include "cpmm/roots.hpp"

#include <cmath>

#include "cpmm/errors.hpp"

namespace cpmm {

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0)) throw NoBracket("bisect: endpoints do not straddle a root");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> scan_bracket(const std::function<double(double)>& f, double start,
                                       double stop, double step) {
    double prev = start, fprev = f(start);
    for (double x = start + step; x <= stop + 1e-12; x += step) {
        double fx = f(x);
        if (fx == 0) return {x, x};
        if ((fx < 0) != (fprev < 0)) return {prev, x};
        prev = x;
        fprev = fx;
    }
    throw NoBracket("scan_bracket: no sign change in range");
}

double min_slope_root() {
    static const double r = [] {
        auto f = [](double x) { return ((x - 2) * x - 1) * x - 2; };
        auto br = scan_bracket(f, 0.0, 16.0);
        return bisect(f, br.first, br.second, 1e-12);
    }();
    return r;
}

double growth_root() {
    static const double r = [] {
        auto f = [](double x) { return ((x - 1) * x - 1) * x - 1; };
        auto br = scan_bracket(f, 0.0, 16.0);
        return bisect(f, br.first, br.second, 1e-12);
    }();
    return r;
}

double recurrence_root_pos(double lambda) {
    // x^2 + (lambda+1)x - lambda = 0, positive branch
    double p = lambda + 1;
    return 0.5 * (-p + std::sqrt(p * p + 4 * lambda));
}

}  // namespace cpmm
