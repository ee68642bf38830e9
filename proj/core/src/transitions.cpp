#include "cpmm/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "spec_internal.hpp"

namespace cpmm {

double BranchGeometry::min_abs_slope() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) m = std::min(m, std::fabs(p.slope));
    return m;
}

struct TransitionRuleSet::Impl {
    std::shared_ptr<const MapSpec> spec;
    bool any_alternating = false;
    mutable std::map<std::pair<int, long long>, int> sub_count_memo;
    mutable std::map<std::pair<int, long long>, std::vector<double>> sub_bounds_memo;

    const MapSpec& S() const { return *spec; }

    static bool alternating(const MapSpec& spec, const BranchDecl& b) {
        if (b.slopes.size() < 2) return false;
        // sign inspection at the guard-floor pattern value
        EvalContext ctx{&spec.consts, b.src.var,
                        static_cast<double>(b.src.guard_ge.value_or(b.src.kind ==
                                                                            SourcePattern::Kind::Literal
                                                                        ? b.src.literal
                                                                        : 0))};
        bool pos = false, neg = false;
        for (const auto& s : b.slopes) {
            double v = eval(*s, ctx);
            (v > 0 ? pos : neg) = true;
        }
        return pos && neg;
    }

    int sub_count(int f, long long i, int depth = 0) const {
        auto key = std::make_pair(f, i);
        auto it = sub_count_memo.find(key);
        if (it != sub_count_memo.end()) return it->second;
        if (!any_alternating) return 1;
        if (depth > 100000) throw DomainError("subdivision closure does not terminate");

        int count = 1;
        detail::MatchedBranch mb = detail::match_branch(S(), f, i);
        if (mb.decl && alternating(S(), *mb.decl)) {
            count = static_cast<int>(mb.decl->slopes.size());
        } else {
            // single monotone branch: inherits the subdivision of a single-id target
            const std::vector<TargetAtom>* atoms = nullptr;
            std::string var;
            long long pv = 0;
            if (mb.decl) {
                atoms = &mb.decl->piece_targets;
                var = mb.decl->src.var;
                pv = mb.pat_value;
            } else {
                detail::MatchedRule r = detail::match_rule(S(), f, i);
                atoms = &r.decl->targets;
                var = r.decl->src.var;
                pv = r.pat_value;
            }
            if (atoms->size() == 1) {
                const TargetAtom& a = atoms->front();
                EvalContext ctx{&S().consts, var, static_cast<double>(pv)};
                if (a.kind == TargetAtom::Kind::Single) {
                    int tf = S().family_index(a.family);
                    count = sub_count(tf, eval_int(*a.single, ctx), depth + 1);
                } else if (a.kind == TargetAtom::Kind::Singleton) {
                    count = sub_count(S().family_index(a.family), 0, depth + 1);
                }
            }
        }
        sub_count_memo[key] = count;
        return count;
    }

    // Boundaries of the subdivision pieces, ascending, size count+1.
    const std::vector<double>& sub_bounds(int f, long long i) const {
        auto key = std::make_pair(f, i);
        auto it = sub_bounds_memo.find(key);
        if (it != sub_bounds_memo.end()) return it->second;

        ExtInterval iv = S().family_interval(f, i);
        int count = sub_count(f, i);
        std::vector<double> b;
        if (count == 1) {
            b = {iv.lo.value(), iv.hi.value()};
        } else {
            detail::MatchedBranch mb = detail::match_branch(S(), f, i);
            if (mb.decl && alternating(S(), *mb.decl)) {
                BranchGeometry g = detail::decl_branch_geometry(S(), f, i);
                b.push_back(g.pieces.front().x_lo);
                for (const auto& p : g.pieces) b.push_back(p.x_hi);
            } else {
                // inherited: pull the target's boundaries back through the branch
                BranchGeometry g = detail::decl_branch_geometry(S(), f, i);
                const AffinePiece& piece = g.pieces.front();
                auto [tf, ti] = single_target(f, i);
                const std::vector<double>& tb = sub_bounds(tf, ti);
                for (double y : tb) b.push_back(piece.inverse(y));
                std::sort(b.begin(), b.end());
            }
        }
        return sub_bounds_memo[key] = std::move(b);
    }

    std::pair<int, long long> single_target(int f, long long i) const {
        detail::MatchedBranch mb = detail::match_branch(S(), f, i);
        const TargetAtom* a;
        std::string var;
        long long pv;
        if (mb.decl) {
            a = &mb.decl->piece_targets.front();
            var = mb.decl->src.var;
            pv = mb.pat_value;
        } else {
            detail::MatchedRule r = detail::match_rule(S(), f, i);
            a = &r.decl->targets.front();
            var = r.decl->src.var;
            pv = r.pat_value;
        }
        EvalContext ctx{&S().consts, var, static_cast<double>(pv)};
        if (a->kind == TargetAtom::Kind::Singleton) return {S().family_index(a->family), 0};
        if (a->kind != TargetAtom::Kind::Single)
            throw DomainError("expected a single-id target");
        return {S().family_index(a->family), eval_int(*a->single, ctx)};
    }

    TargetSpan atom_span(const TargetAtom& a, const std::string& var, long long pv) const {
        EvalContext ctx{&S().consts, var, static_cast<double>(pv)};
        TargetSpan s;
        switch (a.kind) {
            case TargetAtom::Kind::All:
                throw DomainError("atom_span cannot encode 'all'");
            case TargetAtom::Kind::Singleton:
                s.family = S().family_index(a.family);
                s.lo = 0;
                s.hi = 0;
                break;
            case TargetAtom::Kind::Single:
                s.family = S().family_index(a.family);
                s.lo = s.hi.emplace(eval_int(*a.single, ctx));
                break;
            case TargetAtom::Kind::Ray:
                s.family = S().family_index(a.family);
                s.lo = eval_int(*a.lo, ctx);
                break;
            case TargetAtom::Kind::Range: {
                s.family = S().family_index(a.family);
                long long x = eval_int(*a.lo, ctx), y = eval_int(*a.hi, ctx);
                if (x > y) std::swap(x, y);
                s.lo = x;
                s.hi = y;
                break;
            }
        }
        // clip to the family's index domain
        if (S().family(s.family).range == IndexRange::Naturals && s.lo < 0) s.lo = 0;
        return s;
    }

    void all_spans(std::vector<TargetSpan>& out) const {
        for (int f = 0; f < static_cast<int>(S().families.size()); ++f) {
            TargetSpan s;
            s.family = f;
            switch (S().family(f).range) {
                case IndexRange::Singleton:
                    s.lo = 0;
                    s.hi = 0;
                    break;
                case IndexRange::Naturals:
                    s.lo = 0;
                    break;
                case IndexRange::Integers:
                    throw DomainError("'all' over an integer-indexed family is not supported");
            }
            out.push_back(s);
        }
    }

    std::vector<TargetSpan> row(const BasicId& id) const {
        std::vector<TargetSpan> out;
        int count = sub_count(id.family, id.index);
        if (count == 1 || id.sub < 0) {
            if (count > 1)
                throw DomainError("row of a subdivided interval requires an explicit piece id");
            detail::MatchedRule r = detail::match_rule(S(), id.family, id.index);
            for (const auto& a : r.decl->targets) {
                if (a.kind == TargetAtom::Kind::All)
                    all_spans(out);
                else
                    out.push_back(atom_span(a, r.decl->src.var, r.pat_value));
            }
            return out;
        }

        detail::MatchedBranch mb = detail::match_branch(S(), id.family, id.index);
        if (mb.decl && alternating(S(), *mb.decl)) {
            const TargetAtom& a = mb.decl->piece_targets[static_cast<size_t>(id.sub)];
            if (a.kind == TargetAtom::Kind::All)
                all_spans(out);
            else
                out.push_back(atom_span(a, mb.decl->src.var, mb.pat_value));
            return out;
        }

        // inherited subdivision: piece sub maps onto one piece of the target
        auto [tf, ti] = single_target(id.family, id.index);
        BranchGeometry g = detail::decl_branch_geometry(S(), id.family, id.index);
        bool up = g.pieces.front().slope > 0;
        int tcount = sub_count(tf, ti);
        int tsub = up ? id.sub : tcount - 1 - id.sub;
        TargetSpan s;
        s.family = tf;
        s.lo = s.hi.emplace(ti);
        s.sub = tsub;
        out.push_back(s);
        return out;
    }
};

TransitionRuleSet::TransitionRuleSet(std::shared_ptr<const MapSpec> spec)
    : spec_(spec), impl_(std::make_shared<Impl>()) {
    impl_->spec = spec;
    for (const auto& b : spec->branches)
        if (Impl::alternating(*spec, b)) impl_->any_alternating = true;
}

TransitionRuleSet compile_transitions(std::shared_ptr<const MapSpec> spec) {
    return TransitionRuleSet(std::move(spec));
}

int TransitionRuleSet::sub_count(int family, long long index) const {
    return impl_->sub_count(family, index);
}

std::vector<BasicId> TransitionRuleSet::pieces_of(int family, long long index) const {
    int n = impl_->sub_count(family, index);
    std::vector<BasicId> out;
    if (n == 1) {
        out.push_back(BasicId{family, index, -1});
    } else {
        for (int k = 0; k < n; ++k) out.push_back(BasicId{family, index, k});
    }
    return out;
}

std::vector<TargetSpan> TransitionRuleSet::row(const BasicId& id) const { return impl_->row(id); }

bool TransitionRuleSet::entry(const BasicId& I, const BasicId& J) const {
    for (const TargetSpan& s : impl_->row(I)) {
        if (s.family != J.family) continue;
        if (J.index < s.lo) continue;
        if (s.hi && J.index > *s.hi) continue;
        if (s.sub >= 0) {
            if (J.sub == s.sub) return true;
            continue;
        }
        // span covers every piece of the indices it names
        int count = impl_->sub_count(J.family, J.index);
        if (count == 1 ? J.sub < 0 : (J.sub >= 0 && J.sub < count)) return true;
        if (count > 1 && J.sub < 0) return true;  // contains the whole declared interval
    }
    return false;
}

ExtInterval TransitionRuleSet::interval(const BasicId& id) const {
    if (id.sub < 0) return spec_->family_interval(id.family, id.index);
    const auto& b = impl_->sub_bounds(id.family, id.index);
    if (id.sub + 1 >= static_cast<int>(b.size()))
        throw DomainError("piece index out of range");
    return ExtInterval(ExtReal(b[static_cast<size_t>(id.sub)]),
                       ExtReal(b[static_cast<size_t>(id.sub) + 1]));
}

BranchGeometry TransitionRuleSet::geometry(const BasicId& id) const {
    BranchGeometry whole = detail::decl_branch_geometry(*spec_, id.family, id.index);
    if (id.sub < 0) return whole;

    detail::MatchedBranch mb = detail::match_branch(*spec_, id.family, id.index);
    BranchGeometry out;
    if (mb.decl && Impl::alternating(*spec_, *mb.decl)) {
        out.pieces.push_back(whole.pieces[static_cast<size_t>(id.sub)]);
        return out;
    }
    // inherited: slice the single affine piece by the sub interval
    ExtInterval iv = interval(id);
    const AffinePiece& p = whole.pieces.front();
    double ylo = p.at(iv.lo.value()), yhi = p.at(iv.hi.value());
    if (ylo > yhi) std::swap(ylo, yhi);
    out.pieces.push_back(AffinePiece{iv.lo.value(), iv.hi.value(), ylo, yhi, p.slope});
    return out;
}

FiniteMatrix TransitionRuleSet::truncate(const std::vector<BasicId>& window) const {
    FiniteMatrix m;
    m.labels = window;
    m.entries.assign(window.size(), std::vector<int>(window.size(), 0));
    for (size_t r = 0; r < window.size(); ++r)
        for (size_t c = 0; c < window.size(); ++c)
            m.entries[r][c] = entry(window[r], window[c]) ? 1 : 0;
    return m;
}

namespace {

// potential of an id: its index; singletons sit at -1
long long pot_of_family(const MapSpec& spec, int f, long long idx) {
    return spec.family(f).range == IndexRange::Singleton ? -1 : idx;
}

struct AffineBound {
    // value = a*v + c over v >= v_min; unbounded above if a > 0
    long long a = 0, c = 0, v_min = 0;
    bool unbounded = false;
};

}  // namespace

DriftBounds TransitionRuleSet::drift() const {
    const MapSpec& spec = *spec_;
    DriftBounds out;
    long long max_desc = 0, max_asc = 0, max_sym = 0;
    bool desc_ok = true, asc_ok = true, sym_ok = true;

    for (const auto& t : spec.transitions) {
        int sf = spec.family_index(t.src.family);
        // pattern variable domain: [v_min, v_max], either end possibly open
        bool v_lo_open = false, v_hi_open = true;
        long long v_min = 0;
        if (t.src.kind == SourcePattern::Kind::Literal) {
            v_min = t.src.literal;
            v_hi_open = false;
        } else if (t.src.kind == SourcePattern::Kind::Singleton) {
            v_min = 0;
            v_hi_open = false;
        } else if (t.src.guard_ge) {
            v_min = *t.src.guard_ge;
        } else if (spec.family(sf).range == IndexRange::Naturals) {
            v_min = 0;
        } else {
            v_lo_open = true;  // integers, unguarded
        }

        // source potential as an affine a*v + c
        long long sa = 0, sc = 0;
        if (t.src.kind == SourcePattern::Kind::Var) { sa = t.src.coef; sc = t.src.off; }
        else if (t.src.kind == SourcePattern::Kind::Literal) sc = t.src.literal;
        else sc = pot_of_family(spec, sf, 0);

        auto affine_of = [&](const ExprPtr& e) -> std::optional<AffineIndex> {
            if (t.src.kind != SourcePattern::Kind::Var) {
                EvalContext ctx{&spec.consts, "", 0};
                return AffineIndex{0, eval_int(*e, ctx)};
            }
            return try_affine(*e, t.src.var, spec.consts);
        };

        // maximum of (a*v + c) over the pattern domain; nullopt = unbounded
        auto max_affine = [&](long long a, long long c) -> std::optional<long long> {
            if (a == 0) return c;
            if (a > 0 && v_hi_open) return std::nullopt;
            if (a < 0 && v_lo_open) return std::nullopt;
            return a * v_min + c;  // v_hi closed only for literals/singletons where a*v is fixed
        };

        for (const auto& a : t.targets) {
            std::optional<AffineIndex> tmin, tmax;
            if (a.kind == TargetAtom::Kind::All) {
                bool ok = true;
                long long floor_pot = std::numeric_limits<long long>::max();
                for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
                    if (spec.family(f).range == IndexRange::Integers) ok = false;
                    floor_pot = std::min(floor_pot, pot_of_family(spec, f, 0));
                }
                if (ok) tmin = AffineIndex{0, floor_pot};
            } else if (a.kind == TargetAtom::Kind::Singleton) {
                tmin = tmax = AffineIndex{0, -1};
            } else if (a.kind == TargetAtom::Kind::Single) {
                tmin = tmax = affine_of(a.single);
            } else {
                tmin = affine_of(a.lo);
                if (a.kind == TargetAtom::Kind::Range) tmax = affine_of(a.hi);
            }

            if (tmin) {
                auto d = max_affine(sa - tmin->coef, sc - tmin->offset);
                if (d) max_desc = std::max(max_desc, *d);
                else desc_ok = false;
            } else {
                desc_ok = false;
            }
            if (tmax) {
                auto r = max_affine(tmax->coef - sa, tmax->offset - sc);
                if (r) max_asc = std::max(max_asc, *r);
                else asc_ok = false;
            } else {
                asc_ok = false;
            }
            if (tmin && tmax) {
                auto d1 = max_affine(sa - tmin->coef, sc - tmin->offset);
                auto d2 = max_affine(tmin->coef - sa, tmin->offset - sc);
                auto d3 = max_affine(tmax->coef - sa, tmax->offset - sc);
                auto d4 = max_affine(sa - tmax->coef, sc - tmax->offset);
                if (d1 && d2 && d3 && d4)
                    max_sym = std::max({max_sym, *d1, *d2, *d3, *d4});
                else
                    sym_ok = false;
            } else {
                sym_ok = false;
            }
        }
    }
    if (desc_ok) out.descent = max_desc;
    if (asc_ok) out.ascent = max_asc;
    if (sym_ok) out.symmetric = std::max(max_sym, 0LL);
    return out;
}

std::vector<BasicId> TransitionRuleSet::loop_window(const BasicId& u, int n_max) const {
    const MapSpec& spec = *spec_;
    DriftBounds d = drift();
    if (!d.descent)
        throw UnboundedDrift("transitions allow unbounded index drops; no sound loop window");
    long long up = pot_of_family(spec, u.family, u.index) + *d.descent * (n_max + 1) + *d.descent;

    bool any_integers = false;
    for (const auto& f : spec.families)
        if (f.range == IndexRange::Integers) any_integers = true;
    long long down = 0;
    if (any_integers) {
        if (!d.ascent)
            throw UnboundedDrift("transitions allow unbounded index climbs over integer families");
        down = pot_of_family(spec, u.family, u.index) - *d.ascent * (n_max + 1) - *d.ascent;
    }

    std::vector<BasicId> ids;
    for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
        switch (spec.family(f).range) {
            case IndexRange::Singleton:
                ids.push_back(BasicId{f, 0, -1});
                break;
            case IndexRange::Naturals:
                for (long long i = 0; i <= up; ++i)
                    for (const auto& id : pieces_of(f, i)) ids.push_back(id);
                break;
            case IndexRange::Integers:
                for (long long i = down; i <= up; ++i)
                    for (const auto& id : pieces_of(f, i)) ids.push_back(id);
                break;
        }
    }
    return ids;
}

std::vector<BasicId> TransitionRuleSet::window_by_size(long long n) const {
    const MapSpec& spec = *spec_;
    long long singles = 0, weight = 0;
    for (const auto& f : spec.families) {
        if (f.range == IndexRange::Singleton) ++singles;
        else weight += f.range == IndexRange::Naturals ? 1 : 2;
    }
    long long m = weight > 0 ? std::max<long long>(0, (n - singles) / weight) : 0;
    if (singles == 0 && m == 0) m = 1;
    std::vector<BasicId> ids;
    for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
        switch (spec.family(f).range) {
            case IndexRange::Singleton:
                ids.push_back(BasicId{f, 0, -1});
                break;
            case IndexRange::Naturals:
                for (long long i = 0; i < m; ++i)
                    for (const auto& id : pieces_of(f, i)) ids.push_back(id);
                break;
            case IndexRange::Integers:
                for (long long i = -m / 2; i <= m / 2; ++i)
                    for (const auto& id : pieces_of(f, i)) ids.push_back(id);
                break;
        }
    }
    return ids;
}

// ---------------------------------------------------------------------------

std::vector<UniverseSegment> enumerate_universe(const TransitionRuleSet& rules, const Window& w) {
    const MapSpec& spec = rules.spec();
    double tol = 1e-12 * std::max({1.0, std::fabs(w.lo), std::fabs(w.hi)});

    std::vector<UniverseSegment> segs;
    for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
        auto [ilo, ihi] = detail::family_index_window(spec, f, w.index_cap);
        for (long long i = ilo; i <= ihi; ++i) {
            ExtInterval iv = spec.family_interval(f, i);
            if (!(iv.lo.value() >= w.lo - tol && iv.hi.value() <= w.hi + tol)) continue;
            for (const auto& id : rules.pieces_of(f, i)) {
                ExtInterval piece = rules.interval(id);
                UniverseSegment s;
                s.kind = UniverseSegment::Kind::Id;
                s.lo = piece.lo.value();
                s.hi = piece.hi.value();
                s.id = id;
                segs.push_back(std::move(s));
            }
        }
    }
    std::sort(segs.begin(), segs.end(),
              [](const UniverseSegment& a, const UniverseSegment& b) { return a.lo < b.lo; });

    // fill holes with gap segments and attribute family tails to them
    std::vector<UniverseSegment> out;
    double cursor = w.lo;
    auto add_gap_piece = [&](double lo, double hi) {
        UniverseSegment g;
        g.kind = UniverseSegment::Kind::Gap;
        g.lo = lo;
        g.hi = hi;
        for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
            const FamilySpec& fam = spec.family(f);
            if (fam.range == IndexRange::Singleton) continue;
            for (bool upward : {true, false}) {
                if (fam.range == IndexRange::Naturals && !upward) continue;
                auto acc = spec.accumulation(f, upward);
                if (!acc || *acc < lo - tol || *acc > hi + tol) continue;
                long long from = upward ? w.index_cap + 1 : -(w.index_cap + 1);
                ExtInterval probe = spec.family_interval(f, from);
                if (probe.lo.value() >= lo - tol && probe.hi.value() <= hi + tol)
                    g.tails.push_back(TailPart{f, from, upward});
            }
        }
        if (g.tails.empty())
            throw DomainError(
                "window has an unresolved hole at [" + ExtReal(lo).str() + ", " +
                ExtReal(hi).str() + "]; align window endpoints with partition points or raise the index cap");
        out.push_back(std::move(g));
    };
    auto add_gap = [&](double lo, double hi) {
        // split at accumulation points interior to the hole, so they remain
        // addressable boundary points of the universe
        std::vector<double> cuts;
        for (int f = 0; f < static_cast<int>(spec.families.size()); ++f)
            for (bool upward : {false, true}) {
                auto acc = spec.accumulation(f, upward);
                if (acc && *acc > lo + tol && *acc < hi - tol) cuts.push_back(*acc);
            }
        std::sort(cuts.begin(), cuts.end());
        double start = lo;
        for (double c : cuts) {
            if (c > start + tol) add_gap_piece(start, c);
            start = std::max(start, c);
        }
        if (start < hi - tol) add_gap_piece(start, hi);
    };

    for (auto& s : segs) {
        if (s.lo > cursor + tol) add_gap(cursor, s.lo);
        cursor = std::max(cursor, s.hi);
        out.push_back(std::move(s));
    }
    if (cursor < w.hi - tol) add_gap(cursor, w.hi);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

bool family_bipartition(const MapSpec& spec, std::string* witness) {
    int n = static_cast<int>(spec.families.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& t : spec.transitions) {
        int sf = spec.family_index(t.src.family);
        for (const auto& a : t.targets) {
            if (a.kind == TargetAtom::Kind::All) return false;
            int tf = spec.family_index(a.family);
            adj[static_cast<size_t>(sf)].push_back(tf);
        }
    }
    std::vector<int> color(static_cast<size_t>(n), -1);
    for (int start = 0; start < n; ++start) {
        if (color[static_cast<size_t>(start)] != -1) continue;
        color[static_cast<size_t>(start)] = 0;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int t : adj[static_cast<size_t>(v)]) {
                if (color[static_cast<size_t>(t)] == -1) {
                    color[static_cast<size_t>(t)] = 1 - color[static_cast<size_t>(v)];
                    stack.push_back(t);
                } else if (color[static_cast<size_t>(t)] == color[static_cast<size_t>(v)]) {
                    return false;
                }
            }
        }
    }
    // need at least one crossing edge and at least one family on each side
    bool side0 = false, side1 = false;
    for (int c : color) (c == 1 ? side1 : side0) = true;
    if (!side0 || !side1) return false;
    *witness = "family classes {";
    for (int f = 0; f < n; ++f)
        if (color[static_cast<size_t>(f)] == 0) *witness += " " + spec.families[static_cast<size_t>(f)].name;
    *witness += " } and {";
    for (int f = 0; f < n; ++f)
        if (color[static_cast<size_t>(f)] == 1) *witness += " " + spec.families[static_cast<size_t>(f)].name;
    *witness += " } alternate under every transition";
    return true;
}

bool strictly_descending(const MapSpec& spec) {
    // every target index provably below the source index
    for (const auto& t : spec.transitions) {
        if (t.src.kind != SourcePattern::Kind::Var || t.src.coef != 1) return false;
        for (const auto& a : t.targets) {
            if (a.kind != TargetAtom::Kind::Single) return false;
            if (spec.family_index(a.family) != spec.family_index(t.src.family)) return false;
            auto aff = try_affine(*a.single, t.src.var, spec.consts);
            if (!aff || aff->coef != 1 || aff->offset >= 0) return false;
        }
    }
    return !spec.transitions.empty();
}

}  // namespace

MixingReport mixing_heuristic(const TransitionRuleSet& rules, int window_size) {
    const MapSpec& spec = rules.spec();
    MixingReport rep;

    std::string witness;
    if (family_bipartition(spec, &witness)) {
        rep.verdict = MixingReport::Verdict::NotMixingWitness;
        rep.period = 2;
        rep.witness = witness + "; every loop has even length (period 2)";
        return rep;
    }
    if (strictly_descending(spec)) {
        rep.verdict = MixingReport::Verdict::NotMixingWitness;
        rep.witness = "every transition strictly decreases the index; the graph has no loops";
        return rep;
    }

    std::vector<BasicId> window = rules.window_by_size(window_size);
    FiniteMatrix m = rules.truncate(window);
    size_t n = window.size();

    // strong connectivity (two BFS passes)
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            size_t v = stack.back();
            stack.pop_back();
            for (size_t t = 0; t < n; ++t) {
                int e = transpose ? m.entries[t][v] : m.entries[v][t];
                if (e && !seen[t]) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
        return seen;
    };
    auto fwd = reach(false), bwd = reach(true);
    bool strongly_connected = true;
    for (size_t v = 0; v < n; ++v)
        if (!fwd[v] || !bwd[v]) strongly_connected = false;

    // aperiodicity: gcd of cycle mismatches over a BFS tree
    long long g = 0;
    {
        std::vector<long long> depth(n, -1);
        std::vector<size_t> queue{0};
        depth[0] = 0;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            size_t v = queue[qi];
            for (size_t t = 0; t < n; ++t) {
                if (!m.entries[v][t]) continue;
                if (depth[t] == -1) {
                    depth[t] = depth[v] + 1;
                    queue.push_back(t);
                } else {
                    g = std::gcd(g, std::llabs(depth[v] + 1 - depth[t]));
                }
            }
        }
    }

    double min_slope = std::numeric_limits<double>::infinity();
    for (const auto& id : window)
        min_slope = std::min(min_slope, rules.geometry(id).min_abs_slope());

    if (strongly_connected && g == 1 && min_slope > 1.0 + 1e-12) {
        rep.verdict = MixingReport::Verdict::LikelyMixing;
        rep.witness = "window graph strongly connected and aperiodic; all slopes exceed 1 "
                      "(heuristic, not a proof)";
        return rep;
    }
    rep.verdict = MixingReport::Verdict::Inconclusive;
    rep.witness = std::string("window graph ") +
                  (strongly_connected ? "strongly connected" : "not strongly connected") +
                  ", cycle gcd " + std::to_string(g) + ", min |slope| " + ExtReal(min_slope).str();
    return rep;
}

}  // namespace cpmm
