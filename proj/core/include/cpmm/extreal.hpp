#ifndef CPMM_EXTREAL_HPP
#define CPMM_EXTREAL_HPP

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "cpmm/errors.hpp"

namespace cpmm {

// A point of the extended real line [-inf, inf].  Finite coordinates are
// doubles; the infinities are the IEEE infinities.  NaN is never stored, and
// indeterminate forms raise instead of propagating.
class ExtReal {
  public:
    constexpr ExtReal() : v_(0.0) {}
    ExtReal(double v) : v_(v) {
        if (std::isnan(v)) throw IndeterminateForm("NaN is not a point of [-inf, inf]");
    }

    static ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }
    static ExtReal minus_infinity() { return ExtReal(-std::numeric_limits<double>::infinity()); }

    double value() const { return v_; }
    bool finite() const { return std::isfinite(v_); }
    bool is_pos_inf() const { return std::isinf(v_) && v_ > 0; }
    bool is_neg_inf() const { return std::isinf(v_) && v_ < 0; }

    friend auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }
    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_pos_inf() && b.is_neg_inf()) throw IndeterminateForm("inf + (-inf)");
        if (a.is_neg_inf() && b.is_pos_inf()) throw IndeterminateForm("(-inf) + inf");
        return ExtReal(a.v_ + b.v_);
    }
    friend ExtReal operator-(ExtReal a, ExtReal b) {
        if (a.is_pos_inf() && b.is_pos_inf()) throw IndeterminateForm("inf - inf");
        if (a.is_neg_inf() && b.is_neg_inf()) throw IndeterminateForm("(-inf) - (-inf)");
        return ExtReal(a.v_ - b.v_);
    }
    friend ExtReal operator-(ExtReal a) { return ExtReal(-a.v_); }
    friend ExtReal operator*(ExtReal a, ExtReal b) {
        if ((a.v_ == 0 && std::isinf(b.v_)) || (b.v_ == 0 && std::isinf(a.v_)))
            throw IndeterminateForm("0 * inf");
        return ExtReal(a.v_ * b.v_);
    }

    // Rendering used by every file emitter: infinities as "inf"/"-inf".
    std::string str() const;

  private:
    double v_;
};

// Closed subinterval [lo, hi] of the extended line.
struct ExtInterval {
    ExtReal lo, hi;

    ExtInterval() = default;
    ExtInterval(ExtReal lo_, ExtReal hi_) : lo(lo_), hi(hi_) {
        if (hi < lo) throw DomainError("interval endpoints out of order");
    }

    bool contains(ExtReal x) const { return lo <= x && x <= hi; }
    bool contains_interior(ExtReal x) const { return lo < x && x < hi; }
};

// hi - lo; +inf as soon as either endpoint is infinite.
ExtReal length(const ExtInterval& iv);

// slope*x + intercept with sign-correct infinite results.  slope must be
// nonzero when x is infinite (0 * inf would otherwise silently poison sums).
ExtReal apply_affine(double slope, double intercept, ExtReal x);

}  // namespace cpmm

#endif
