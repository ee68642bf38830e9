#include <algorithm>
#include <cmath>

#include "spec_internal.hpp"

namespace cpmm::detail {

namespace {

constexpr long long kIndexProbeLimit = 1LL << 42;

double eval_at(const MapSpec& spec, const ExprPtr& e, const std::string& var, long long value) {
    EvalContext ctx{&spec.consts, var, static_cast<double>(value)};
    return eval(*e, ctx);
}

bool branch_covers(const MapSpec& spec, const BranchDecl& b, int family, long long index,
                   long long* pat_value) {
    if (spec.family_index(b.src.family) != family) return false;
    auto v = b.src.match(index);
    if (!v) return false;
    if (b.set_guard != BranchDecl::SetGuard::None) {
        const IsetDecl* s = spec.iset(b.iset);
        bool in = s->contains(index, spec.consts);
        if ((b.set_guard == BranchDecl::SetGuard::In) != in) return false;
    }
    *pat_value = *v;
    return true;
}

}  // namespace

MatchedRule match_rule(const MapSpec& spec, int family, long long index) {
    MatchedRule found;
    for (const auto& t : spec.transitions) {
        if (spec.family_index(t.src.family) != family) continue;
        auto v = t.src.match(index);
        if (!v) continue;
        bool literal = t.src.kind == SourcePattern::Kind::Literal;
        if (found.decl) {
            bool found_literal = found.decl->src.kind == SourcePattern::Kind::Literal;
            if (literal == found_literal)
                throw ValidationError(ValidationKind::RuleConflict,
                                      "two transition rules cover " +
                                          format_id(spec, BasicId{family, index, -1}));
            if (!literal) continue;  // keep the literal rule
        }
        found.decl = &t;
        found.pat_value = *v;
    }
    if (!found.decl)
        throw ValidationError(ValidationKind::RuleGap,
                              "no transition rule covers " +
                                  format_id(spec, BasicId{family, index, -1}));
    return found;
}

MatchedBranch match_branch(const MapSpec& spec, int family, long long index) {
    MatchedBranch found;
    for (const auto& b : spec.branches) {
        long long v;
        if (!branch_covers(spec, b, family, index, &v)) continue;
        bool literal = b.src.kind == SourcePattern::Kind::Literal;
        if (found.decl) {
            bool found_literal = found.decl->src.kind == SourcePattern::Kind::Literal;
            if (literal == found_literal)
                throw ValidationError(ValidationKind::RuleConflict,
                                      "two branch declarations cover " +
                                          format_id(spec, BasicId{family, index, -1}));
            if (!literal) continue;
        }
        found.decl = &b;
        found.pat_value = v;
    }
    return found;
}

ExtInterval atom_extent(const MapSpec& spec, const TargetAtom& atom, const std::string& pat_var,
                        long long pat_value) {
    EvalContext base{&spec.consts, pat_var, static_cast<double>(pat_value)};
    auto idx_of = [&](const ExprPtr& e) {
        return eval_int(*e, base);
    };
    if (atom.kind == TargetAtom::Kind::All) {
        double lo = spec.space.lo.value(), hi = spec.space.hi.value();
        return ExtInterval(ExtReal(lo), ExtReal(hi));
    }
    int f = spec.family_index(atom.family);
    if (f < 0) throw ValidationError(ValidationKind::BadDeclaration,
                                     "unknown family '" + atom.family + "' in target");
    switch (atom.kind) {
        case TargetAtom::Kind::Singleton:
            return spec.family_interval(f, 0);
        case TargetAtom::Kind::Single:
            return spec.family_interval(f, idx_of(atom.single));
        case TargetAtom::Kind::Ray: {
            long long t = idx_of(atom.lo);
            ExtInterval near = spec.family_interval(f, t);
            auto far = spec.accumulation(f, /*upward=*/true);
            if (!far)
                throw ValidationError(ValidationKind::BadDeclaration,
                                      "unbounded target range over family '" + atom.family +
                                          "' with no declared accumulation point");
            double lo = std::min(near.lo.value(), *far);
            double hi = std::max(near.hi.value(), *far);
            return ExtInterval(ExtReal(lo), ExtReal(hi));
        }
        case TargetAtom::Kind::Range: {
            long long a = idx_of(atom.lo), b2 = idx_of(atom.hi);
            if (a > b2) std::swap(a, b2);
            ExtInterval ia = spec.family_interval(f, a);
            ExtInterval ib = spec.family_interval(f, b2);
            double lo = std::min(ia.lo.value(), ib.lo.value());
            double hi = std::max(ia.hi.value(), ib.hi.value());
            return ExtInterval(ExtReal(lo), ExtReal(hi));
        }
        case TargetAtom::Kind::All:
            break;
    }
    return spec.space;
}

ExtInterval targets_hull(const MapSpec& spec, const std::vector<TargetAtom>& atoms,
                         const std::string& pat_var, long long pat_value) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms) {
        ExtInterval e = atom_extent(spec, a, pat_var, pat_value);
        lo = std::min(lo, e.lo.value());
        hi = std::max(hi, e.hi.value());
    }
    return ExtInterval(ExtReal(lo), ExtReal(hi));
}

bool orient_up(const MapSpec& spec, int family, long long index) {
    switch (spec.family(family).orient) {
        case Orient::Up: return true;
        case Orient::Down: return false;
        case Orient::EvenUp: return (index % 2 + 2) % 2 == 0;
        case Orient::EvenDown: return (index % 2 + 2) % 2 == 1;
        case Orient::Unspecified:
            throw ValidationError(ValidationKind::BadDeclaration,
                                  "family '" + spec.family(family).name +
                                      "' needs an orient attribute (no branch declaration)");
    }
    return true;
}

BranchGeometry decl_branch_geometry(const MapSpec& spec, int family, long long index) {
    ExtInterval dom = spec.family_interval(family, index);
    if (!dom.lo.finite() || !dom.hi.finite())
        throw DomainError("branch geometry over an infinite basic interval is not representable");
    double x_lo = dom.lo.value(), x_hi = dom.hi.value();

    MatchedBranch mb = match_branch(spec, family, index);
    BranchGeometry geo;
    if (!mb.decl) {
        MatchedRule rule = match_rule(spec, family, index);
        ExtInterval hull = targets_hull(spec, rule.decl->targets, rule.decl->src.var,
                                        rule.pat_value);
        if (!hull.lo.finite() || !hull.hi.finite())
            throw DomainError("affine branch cannot cover an infinite target hull");
        bool up = orient_up(spec, family, index);
        double len = x_hi - x_lo;
        double s = (hull.hi.value() - hull.lo.value()) / len;
        geo.pieces.push_back(AffinePiece{x_lo, x_hi, hull.lo.value(), hull.hi.value(),
                                         up ? s : -s});
        return geo;
    }

    const BranchDecl& b = *mb.decl;
    EvalContext ctx{&spec.consts, b.src.var, static_cast<double>(mb.pat_value)};
    double cursor = x_lo;
    for (size_t k = 0; k < b.slopes.size(); ++k) {
        double slope = eval(*b.slopes[k], ctx);
        if (slope == 0)
            throw ValidationError(ValidationKind::BadDeclaration, "zero slope in branch");
        ExtInterval hull = atom_extent(spec, b.piece_targets[k], b.src.var, mb.pat_value);
        if (!hull.lo.finite() || !hull.hi.finite())
            throw DomainError("affine piece cannot cover an infinite target");
        double width = (hull.hi.value() - hull.lo.value()) / std::fabs(slope);
        double next = (k + 1 == b.slopes.size()) ? x_hi : cursor + width;
        geo.pieces.push_back(AffinePiece{cursor, next, hull.lo.value(), hull.hi.value(), slope});
        cursor = next;
    }
    return geo;
}

void atom_indices(const MapSpec& spec, const TargetAtom& atom, const std::string& pat_var,
                  long long pat_value, long long cap, std::vector<std::pair<int, long long>>& out) {
    EvalContext base{&spec.consts, pat_var, static_cast<double>(pat_value)};
    if (atom.kind == TargetAtom::Kind::All) {
        for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
            auto [lo, hi] = family_index_window(spec, f, cap);
            for (long long i = lo; i <= hi; ++i) out.emplace_back(f, i);
        }
        return;
    }
    int f = spec.family_index(atom.family);
    switch (atom.kind) {
        case TargetAtom::Kind::Singleton:
            out.emplace_back(f, 0);
            break;
        case TargetAtom::Kind::Single:
            out.emplace_back(f, eval_int(*atom.single, base));
            break;
        case TargetAtom::Kind::Ray: {
            long long t = eval_int(*atom.lo, base);
            auto [lo, hi] = family_index_window(spec, f, cap);
            for (long long i = std::max(t, lo); i <= hi; ++i) out.emplace_back(f, i);
            break;
        }
        case TargetAtom::Kind::Range: {
            long long a = eval_int(*atom.lo, base), b2 = eval_int(*atom.hi, base);
            if (a > b2) std::swap(a, b2);
            auto [lo, hi] = family_index_window(spec, f, cap);
            for (long long i = std::max(a, lo); i <= std::min(b2, hi); ++i) out.emplace_back(f, i);
            break;
        }
        case TargetAtom::Kind::All:
            break;
    }
}

std::pair<long long, long long> family_index_window(const MapSpec& spec, int f, long long cap) {
    switch (spec.family(f).range) {
        case IndexRange::Singleton: return {0, 0};
        case IndexRange::Naturals: return {0, cap};
        case IndexRange::Integers: return {-cap, cap};
    }
    return {0, 0};
}

namespace {

// family index direction: +1 if intervals move right as the index grows
int family_direction(const MapSpec& spec, int f) {
    const FamilySpec& fam = spec.family(f);
    if (fam.range == IndexRange::Singleton) return 0;
    long long i0 = fam.range == IndexRange::Naturals ? 0 : 0;
    double a = eval_at(spec, fam.lo, "i", i0);
    double b2 = eval_at(spec, fam.lo, "i", i0 + 1);
    return b2 > a ? 1 : -1;
}

}  // namespace

std::vector<Located> locate_point(const MapSpec& spec, double x, double tol) {
    std::vector<Located> hits;
    for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
        const FamilySpec& fam = spec.family(f);
        if (fam.range == IndexRange::Singleton) {
            ExtInterval iv = spec.family_interval(f, 0);
            if (x >= iv.lo.value() - tol && x <= iv.hi.value() + tol) {
                int pos = std::fabs(x - iv.lo.value()) <= tol   ? -1
                          : std::fabs(x - iv.hi.value()) <= tol ? 1
                                                                : 0;
                hits.push_back(Located{f, 0, pos});
            }
            continue;
        }
        int dir = family_direction(spec, f);
        // Geometric position of index i along the direction of growth.
        auto lo_of = [&](long long i) { return eval_at(spec, fam.lo, "i", i); };
        auto hi_of = [&](long long i) { return eval_at(spec, fam.hi, "i", i); };

        // Find any index i whose interval is at or beyond x in each direction,
        // by exponential probing, then binary search.
        long long lo_idx, hi_idx;
        if (fam.range == IndexRange::Naturals) {
            lo_idx = 0;
            hi_idx = 1;
            while (hi_idx < kIndexProbeLimit) {
                double v = dir > 0 ? lo_of(hi_idx) : hi_of(hi_idx);
                if (dir > 0 ? v > x : v < x) break;
                hi_idx *= 2;
            }
        } else {
            lo_idx = -1;
            while (lo_idx > -kIndexProbeLimit) {
                double v = dir > 0 ? hi_of(lo_idx) : lo_of(lo_idx);
                if (dir > 0 ? v < x : v > x) break;
                lo_idx *= 2;
            }
            hi_idx = 1;
            while (hi_idx < kIndexProbeLimit) {
                double v = dir > 0 ? lo_of(hi_idx) : hi_of(hi_idx);
                if (dir > 0 ? v > x : v < x) break;
                hi_idx *= 2;
            }
        }
        // Binary search for the index whose interval might contain x.
        while (lo_idx < hi_idx) {
            long long mid = lo_idx + (hi_idx - lo_idx) / 2;
            double v = dir > 0 ? hi_of(mid) : lo_of(mid);
            bool before = dir > 0 ? v < x - tol : v > x + tol;
            if (before)
                lo_idx = mid + 1;
            else
                hi_idx = mid;
        }
        for (long long i = lo_idx - 1; i <= lo_idx + 1; ++i) {
            if (fam.range == IndexRange::Naturals && i < 0) continue;
            if (std::llabs(i) >= kIndexProbeLimit) continue;
            double a = lo_of(i), b2 = hi_of(i);
            if (!(std::isfinite(a) && std::isfinite(b2))) continue;
            if (x >= a - tol && x <= b2 + tol) {
                int pos = std::fabs(x - a) <= tol ? -1 : std::fabs(x - b2) <= tol ? 1 : 0;
                hits.push_back(Located{f, i, pos});
            }
        }
    }
    return hits;
}

}  // namespace cpmm::detail

namespace cpmm {

ExtReal evaluate_map(const MapSpec& spec, ExtReal x) {
    if (!spec.space.contains(x)) throw DomainError("point outside the map's space");

    for (double p : spec.fixed_points)
        if (x.value() == p || (!x.finite() && std::isinf(p) && (p > 0) == x.is_pos_inf()))
            return ExtReal(p);

    double xv = x.value();
    double scale = std::max(1.0, std::fabs(xv));
    double tol = 1e-13 * scale;
    auto hits = detail::locate_point(spec, xv, tol);

    // Collect the one-sided values available at x.
    std::vector<double> values;
    bool interior = false;
    double interior_value = 0;
    for (const auto& h : hits) {
        BranchGeometry geo = detail::decl_branch_geometry(spec, h.family, h.index);
        ExtInterval iv = spec.family_interval(h.family, h.index);
        double cx = std::clamp(xv, iv.lo.value(), iv.hi.value());
        for (const auto& piece : geo.pieces) {
            if (cx < piece.x_lo - tol || cx > piece.x_hi + tol) continue;
            double y = piece.at(std::clamp(cx, piece.x_lo, piece.x_hi));
            if (h.pos == 0 && cx > piece.x_lo + tol && cx < piece.x_hi - tol) {
                interior = true;
                interior_value = y;
            }
            values.push_back(y);
        }
    }

    if (interior) return ExtReal(interior_value);

    if (values.empty()) {
        // Accumulation point of the partition: take the continuity limit along
        // nearby basic intervals and snap it to the partition.
        double best = std::numeric_limits<double>::quiet_NaN();
        for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
            for (bool up : {false, true}) {
                auto acc = spec.accumulation(f, up);
                if (!acc || std::fabs(*acc - xv) > tol) continue;
                auto [lo, hi] = detail::family_index_window(spec, f, 1LL << 20);
                long long probe1 = up ? 64 : (spec.family(f).range == IndexRange::Integers ? -64 : 0);
                long long probe2 = up ? 128 : (spec.family(f).range == IndexRange::Integers ? -128 : 0);
                (void)lo; (void)hi;
                BranchGeometry g1 = detail::decl_branch_geometry(spec, f, probe1);
                BranchGeometry g2 = detail::decl_branch_geometry(spec, f, probe2);
                double v1 = g1.pieces.front().at(g1.pieces.front().x_lo);
                double v2 = g2.pieces.front().at(g2.pieces.front().x_lo);
                if (std::fabs(v1 - v2) < 1e-6 * scale) best = v2;
            }
        }
        if (std::isnan(best)) throw DomainError("no branch covers the point");
        // snap to a nearby partition value
        auto near_hits = detail::locate_point(spec, best, 1e-9);
        for (const auto& h : near_hits) {
            ExtInterval iv = spec.family_interval(h.family, h.index);
            if (std::fabs(best - iv.lo.value()) < 1e-9) return ExtReal(iv.lo.value());
            if (std::fabs(best - iv.hi.value()) < 1e-9) return ExtReal(iv.hi.value());
        }
        if (std::fabs(best - spec.space.lo.value()) < 1e-9) return spec.space.lo;
        if (std::fabs(best - spec.space.hi.value()) < 1e-9) return spec.space.hi;
        return ExtReal(best);
    }

    double v0 = values.front();
    bool all_agree = true;
    for (double v : values)
        if (std::fabs(v - v0) > 1e-9 * std::max(1.0, std::fabs(v0))) all_agree = false;

    if (!all_agree) {
        if (spec.piecewise)
            throw UndefinedAtPartitionPoint("one-sided values differ at a partition point");
        throw ValidationError(ValidationKind::DiscontinuousBranch,
                              "global-continuity map has mismatched one-sided values");
    }
    return ExtReal(v0);
}

}  // namespace cpmm
