#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "spec_internal.hpp"

namespace cpmm {

namespace {

using detail::atom_indices;
using detail::family_index_window;

struct SampledId {
    int family;
    long long index;
    double lo, hi;
};

std::string name_of(const MapSpec& spec, int f, long long i) {
    return format_id(spec, BasicId{f, i, -1});
}

std::vector<long long> sample_indices(const MapSpec& spec, int f, long long n) {
    switch (spec.family(f).range) {
        case IndexRange::Singleton: return {0};
        case IndexRange::Naturals: {
            std::vector<long long> v;
            for (long long i = 0; i <= n; ++i) v.push_back(i);
            return v;
        }
        case IndexRange::Integers: {
            std::vector<long long> v;
            for (long long i = -n / 2 - 1; i <= n / 2 + 1; ++i) v.push_back(i);
            return v;
        }
    }
    return {};
}

double rel_tol(double tol, double a, double b) {
    return tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

void validate_spec(const MapSpec& spec, const ValidateOptions& opt) {
    const double tol = opt.tol;

    // family declarations
    std::set<std::string> names;
    for (const auto& f : spec.families) {
        if (!names.insert(f.name).second)
            throw ValidationError(ValidationKind::BadDeclaration,
                                  "family '" + f.name + "' declared twice");
        if (f.range == IndexRange::Singleton && !f.accumulates.empty())
            throw ValidationError(ValidationKind::BadDeclaration,
                                  "singleton family '" + f.name + "' cannot accumulate");
        if (f.range == IndexRange::Integers && f.accumulates.size() == 1)
            throw ValidationError(ValidationKind::BadDeclaration,
                                  "integer-indexed family '" + f.name +
                                      "' needs accumulation points for both index directions");
    }

    // isets strictly increasing
    for (const auto& s : spec.isets) {
        EvalContext ctx{&spec.consts, s.var, 0};
        long long prev = 0;
        for (long long k = s.k_start; k < s.k_start + 100; ++k) {
            ctx.var_value = static_cast<double>(k);
            long long v = eval_int(*s.generator, ctx);
            if (k > s.k_start && v <= prev)
                throw ValidationError(ValidationKind::BadDeclaration,
                                      "iset '" + s.name + "' is not strictly increasing");
            prev = v;
        }
    }

    // sampled intervals: well-formed, inside space, pairwise disjoint
    std::vector<SampledId> ids;
    for (int f = 0; f < static_cast<int>(spec.families.size()); ++f) {
        for (long long i : sample_indices(spec, f, opt.sample_indices)) {
            ExtInterval iv = spec.family_interval(f, i);  // throws DegenerateInterval
            double lo = iv.lo.value(), hi = iv.hi.value();
            if (lo < spec.space.lo.value() - rel_tol(tol, lo, 0) ||
                hi > spec.space.hi.value() + rel_tol(tol, hi, 0))
                throw ValidationError(ValidationKind::EndpointEscapesPartition,
                                      name_of(spec, f, i) + " leaves the declared space");
            ids.push_back(SampledId{f, i, lo, hi});
        }
    }
    std::sort(ids.begin(), ids.end(),
              [](const SampledId& a, const SampledId& b) { return a.lo < b.lo; });
    for (size_t k = 0; k + 1 < ids.size(); ++k) {
        const auto& a = ids[k];
        const auto& b = ids[k + 1];
        if (b.lo < a.hi - rel_tol(tol, a.hi, b.lo))
            throw ValidationError(ValidationKind::OverlappingIntervals,
                                  name_of(spec, a.family, a.index) + " overlaps " +
                                      name_of(spec, b.family, b.index));
    }

    // declared order: directions consistent with geometry, blocks disjoint and ordered
    std::set<std::string> ordered_families;
    double prev_extent_hi = -std::numeric_limits<double>::infinity();
    for (const auto& item : spec.order) {
        double block_lo = std::numeric_limits<double>::infinity();
        double block_hi = -std::numeric_limits<double>::infinity();
        for (const auto& fname : item.families) {
            int f = spec.family_index(fname);
            if (f < 0)
                throw ValidationError(ValidationKind::OrderMismatch,
                                      "order names unknown family '" + fname + "'");
            ordered_families.insert(fname);
            const FamilySpec& fam = spec.family(f);
            if (fam.range != IndexRange::Singleton) {
                double l0 = spec.family_interval(f, 0).lo.value();
                double l1 = spec.family_interval(f, 1).lo.value();
                bool geo_ascending = l1 > l0;
                if (geo_ascending != item.ascending)
                    throw ValidationError(ValidationKind::OrderMismatch,
                                          "family '" + fname +
                                              "' direction disagrees with its endpoints");
            }
            for (bool up : {false, true}) {
                auto acc = spec.accumulation(f, up);
                if (acc) {
                    block_lo = std::min(block_lo, *acc);
                    block_hi = std::max(block_hi, *acc);
                }
            }
            for (const auto& s : ids)
                if (s.family == f) {
                    block_lo = std::min(block_lo, s.lo);
                    block_hi = std::max(block_hi, s.hi);
                }
        }
        if (block_lo < prev_extent_hi - rel_tol(tol, block_lo, prev_extent_hi))
            throw ValidationError(ValidationKind::OrderMismatch,
                                  "order blocks overlap near " + ExtReal(block_lo).str());
        prev_extent_hi = std::max(prev_extent_hi, block_hi);
    }
    for (const auto& f : spec.families)
        if (!ordered_families.count(f.name) && !spec.order.empty())
            throw ValidationError(ValidationKind::OrderMismatch,
                                  "family '" + f.name + "' missing from the order declaration");

    // rule determinism/coverage and branch/rule agreement on sampled ids
    for (const auto& s : ids) {
        detail::MatchedRule rule = detail::match_rule(spec, s.family, s.index);
        detail::MatchedBranch br = detail::match_branch(spec, s.family, s.index);
        if (br.decl) {
            // the union of piece targets must equal the rule targets
            std::vector<std::pair<int, long long>> from_rule, from_branch;
            for (const auto& a : rule.decl->targets)
                atom_indices(spec, a, rule.decl->src.var, rule.pat_value, opt.sample_indices + 16,
                             from_rule);
            for (const auto& a : br.decl->piece_targets)
                atom_indices(spec, a, br.decl->src.var, br.pat_value, opt.sample_indices + 16,
                             from_branch);
            std::set<std::pair<int, long long>> ra(from_rule.begin(), from_rule.end());
            std::set<std::pair<int, long long>> ba(from_branch.begin(), from_branch.end());
            if (ra != ba)
                throw ValidationError(ValidationKind::RuleConflict,
                                      "branch targets of " + name_of(spec, s.family, s.index) +
                                          " disagree with its transition rule");
        }

        // image contiguity: enumerated targets plus accumulation jumps tile the hull
        BranchGeometry geo = detail::decl_branch_geometry(spec, s.family, s.index);
        std::vector<const std::vector<TargetAtom>*> groups;
        std::vector<std::pair<std::string, long long>> group_ctx;
        // contiguity is checked piece by piece against each piece's target group
        const std::string& var = br.decl ? br.decl->src.var : rule.decl->src.var;
        long long pv = br.decl ? br.pat_value : rule.pat_value;
        std::vector<std::vector<TargetAtom>> piece_atoms;
        if (br.decl) {
            for (const auto& a : br.decl->piece_targets) piece_atoms.push_back({a});
        } else {
            piece_atoms.push_back(rule.decl->targets);
        }
        for (size_t k = 0; k < piece_atoms.size(); ++k) {
            const auto& piece = geo.pieces[k];
            std::vector<std::pair<int, long long>> tgt;
            for (const auto& a : piece_atoms[k])
                atom_indices(spec, a, var, pv, opt.sample_indices + 16, tgt);
            std::vector<std::pair<double, double>> ivs;
            for (auto [f2, i2] : tgt) {
                ExtInterval iv = spec.family_interval(f2, i2);
                ivs.emplace_back(iv.lo.value(), iv.hi.value());
            }
            std::sort(ivs.begin(), ivs.end());
            std::set<int> tgt_fams;
            for (auto [f2, i2] : tgt) tgt_fams.insert(f2);
            auto gap_has_accumulation = [&](double glo, double ghi) {
                for (int f2 : tgt_fams)
                    for (bool up : {false, true}) {
                        auto acc = spec.accumulation(f2, up);
                        if (acc && *acc >= glo - rel_tol(tol, glo, *acc) &&
                            *acc <= ghi + rel_tol(tol, ghi, *acc))
                            return true;
                    }
                return false;
            };
            double cursor = piece.y_lo;
            for (auto& [l, h] : ivs) {
                if (h < cursor - rel_tol(tol, h, cursor)) continue;  // nested/duplicate
                if (l > cursor + rel_tol(tol, l, cursor) && !gap_has_accumulation(cursor, l))
                    throw ValidationError(
                        ValidationKind::NonMarkovImage,
                        "image of " + name_of(spec, s.family, s.index) +
                            " misses part of its declared targets near " + ExtReal(cursor).str());
                cursor = std::max(cursor, h);
            }
            if (cursor < piece.y_hi - rel_tol(tol, cursor, piece.y_hi) &&
                !gap_has_accumulation(cursor, piece.y_hi))
                throw ValidationError(ValidationKind::NonMarkovImage,
                                      "image of " + name_of(spec, s.family, s.index) +
                                          " does not reach the end of its target hull");
        }

        // explicit branches must tile the interval exactly
        if (br.decl && geo.pieces.size() >= 1) {
            double width_sum = 0;
            EvalContext ctx{&spec.consts, var, static_cast<double>(pv)};
            for (size_t k = 0; k < br.decl->slopes.size(); ++k) {
                double slope = eval(*br.decl->slopes[k], ctx);
                ExtInterval hull = detail::atom_extent(spec, br.decl->piece_targets[k], var, pv);
                width_sum += (hull.hi.value() - hull.lo.value()) / std::fabs(slope);
            }
            double len = spec.family_interval(s.family, s.index).hi.value() -
                         spec.family_interval(s.family, s.index).lo.value();
            if (std::fabs(width_sum - len) > rel_tol(tol, width_sum, len))
                throw ValidationError(ValidationKind::NonMarkovImage,
                                      "branch pieces of " + name_of(spec, s.family, s.index) +
                                          " do not tile the interval (slopes inconsistent with "
                                          "target lengths)");
        }

        // multi-piece value continuity inside one monotone basic interval
        bool pos = false, neg = false;
        for (const auto& p : geo.pieces) (p.slope > 0 ? pos : neg) = true;
        bool monotone_chain = !(pos && neg);
        if (geo.pieces.size() > 1 && (monotone_chain || !spec.piecewise)) {
            for (size_t k = 0; k + 1 < geo.pieces.size(); ++k) {
                double a = geo.pieces[k].at(geo.pieces[k].x_hi);
                double b = geo.pieces[k + 1].at(geo.pieces[k + 1].x_lo);
                if (std::fabs(a - b) > rel_tol(tol, a, b))
                    throw ValidationError(ValidationKind::DiscontinuousBranch,
                                          "branch of " + name_of(spec, s.family, s.index) +
                                              " jumps inside the interval");
            }
        }
    }

    // global continuity across adjacent sampled intervals
    if (!spec.piecewise) {
        for (size_t k = 0; k + 1 < ids.size(); ++k) {
            const auto& a = ids[k];
            const auto& b = ids[k + 1];
            if (std::fabs(a.hi - b.lo) > rel_tol(tol, a.hi, b.lo)) continue;  // gap between blocks
            BranchGeometry ga = detail::decl_branch_geometry(spec, a.family, a.index);
            BranchGeometry gb = detail::decl_branch_geometry(spec, b.family, b.index);
            double va = ga.pieces.back().at(ga.pieces.back().x_hi);
            double vb = gb.pieces.front().at(gb.pieces.front().x_lo);
            if (std::fabs(va - vb) > rel_tol(tol, va, vb))
                throw ValidationError(ValidationKind::DiscontinuousBranch,
                                      "map value jumps at the point between " +
                                          name_of(spec, a.family, a.index) + " and " +
                                          name_of(spec, b.family, b.index));
        }
    }
}

}  // namespace cpmm
