#include "cpmm/extreal.hpp"

#include <cstdio>

namespace cpmm {

const char* to_string(ValidationKind k) {
    switch (k) {
        case ValidationKind::OverlappingIntervals: return "overlapping-intervals";
        case ValidationKind::NonMarkovImage: return "non-markov-image";
        case ValidationKind::EndpointEscapesPartition: return "endpoint-escapes-partition";
        case ValidationKind::DegenerateInterval: return "degenerate-interval";
        case ValidationKind::OrderMismatch: return "order-mismatch";
        case ValidationKind::RuleConflict: return "rule-conflict";
        case ValidationKind::RuleGap: return "rule-gap";
        case ValidationKind::DiscontinuousBranch: return "discontinuous-branch";
        case ValidationKind::BadDeclaration: return "bad-declaration";
    }
    return "validation-error";
}

std::string ExtReal::str() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v_);
    return buf;
}

ExtReal length(const ExtInterval& iv) {
    if (!iv.lo.finite() || !iv.hi.finite()) return ExtReal::infinity();
    return ExtReal(iv.hi.value() - iv.lo.value());
}

ExtReal apply_affine(double slope, double intercept, ExtReal x) {
    if (!x.finite()) {
        if (slope == 0.0) throw IndeterminateForm("affine image of an infinity with slope 0");
        return (slope > 0) == x.is_pos_inf() ? ExtReal::infinity() : ExtReal::minus_infinity();
    }
    return ExtReal(slope * x.value() + intercept);
}

}  // namespace cpmm
