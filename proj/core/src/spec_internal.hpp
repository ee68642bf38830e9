#ifndef CPMM_SPEC_INTERNAL_HPP
#define CPMM_SPEC_INTERNAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "cpmm/mapspec.hpp"
#include "cpmm/transitions.hpp"

// Declaration-level helpers shared by the parser, validator, evaluator and the
// rule compiler.

namespace cpmm::detail {

struct MatchedRule {
    const TransitionDecl* decl = nullptr;
    long long pat_value = 0;  // value of the pattern variable (or the literal index)
};

struct MatchedBranch {
    const BranchDecl* decl = nullptr;  // null = default single-piece branch
    long long pat_value = 0;
};

// The unique transition rule covering (family, index); throws ValidationError
// on conflict or gap.
MatchedRule match_rule(const MapSpec& spec, int family, long long index);

// The branch declaration covering (family, index), if any.
MatchedBranch match_branch(const MapSpec& spec, int family, long long index);

// Geometric extent [lo, hi] of one resolved target atom (accumulation-aware).
ExtInterval atom_extent(const MapSpec& spec, const TargetAtom& atom, const std::string& pat_var,
                        long long pat_value);

// Hull of a full target list.
ExtInterval targets_hull(const MapSpec& spec, const std::vector<TargetAtom>& atoms,
                         const std::string& pat_var, long long pat_value);

// Default-branch direction for (family, index) from the family orient attribute.
bool orient_up(const MapSpec& spec, int family, long long index);

// Branch geometry over the whole declared interval (family, index): explicit
// pieces from a branch declaration, else one affine map onto the target hull.
BranchGeometry decl_branch_geometry(const MapSpec& spec, int family, long long index);

// Enumerate concrete column indices of an atom, clipped to |index| <= cap.
// Appends (family, index) pairs.
void atom_indices(const MapSpec& spec, const TargetAtom& atom, const std::string& pat_var,
                  long long pat_value, long long cap, std::vector<std::pair<int, long long>>& out);

// Index domain of family f clipped to |i| <= cap.
std::pair<long long, long long> family_index_window(const MapSpec& spec, int f, long long cap);

// Locate the declared interval containing x; pos = -1/0/+1 for at-lo/interior/at-hi.
struct Located {
    int family = -1;
    long long index = 0;
    int pos = 0;
};
std::vector<Located> locate_point(const MapSpec& spec, double x, double tol = 0.0);

}  // namespace cpmm::detail

#endif
