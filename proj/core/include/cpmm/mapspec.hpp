#ifndef CPMM_MAPSPEC_HPP
#define CPMM_MAPSPEC_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpmm/expr.hpp"
#include "cpmm/extreal.hpp"

namespace cpmm {

// ---------------------------------------------------------------------------
// Declarations of a countably piecewise monotone Markov map (.cpmm format).

enum class IndexRange { Naturals, Integers, Singleton };

// Monotonicity of the (default, single-piece) branch over a basic interval.
// EvenUp/EvenDown make the direction alternate with index parity.
enum class Orient { Unspecified, Up, Down, EvenUp, EvenDown };

struct FamilySpec {
    std::string name;
    IndexRange range = IndexRange::Singleton;
    ExprPtr lo, hi;                    // endpoint formulas in the index variable "i"
    std::vector<ExprPtr> accumulates;  // declared limit points; integers: (i->-inf, i->+inf)
    Orient orient = Orient::Unspecified;
};

// Source pattern of a transition/branch declaration: D, C_i, I_0, I_(2*k), ...
struct SourcePattern {
    std::string family;
    enum class Kind { Singleton, Var, Literal } kind = Kind::Singleton;
    std::string var;          // Kind::Var
    long long coef = 1;       // index = coef*var + off
    long long off = 0;
    long long literal = 0;    // Kind::Literal
    std::optional<long long> guard_ge;  // "for v >= n"

    // Does this pattern cover the given index? On success yields the pattern
    // variable value.
    std::optional<long long> match(long long index) const;
};

struct TargetAtom {
    std::string family;
    enum class Kind { All, Singleton, Single, Ray, Range } kind = Kind::All;
    ExprPtr single;        // Kind::Single: index expression in the pattern variable
    std::string range_var; // Ray/Range bound variable
    ExprPtr lo, hi;        // Ray: lo only; Range: both
};

struct TransitionDecl {
    SourcePattern src;
    std::vector<TargetAtom> targets;
};

struct BranchDecl {
    SourcePattern src;
    enum class SetGuard { None, In, NotIn } set_guard = SetGuard::None;
    std::string iset;
    std::vector<ExprPtr> slopes;            // signed, one per piece
    std::vector<TargetAtom> piece_targets;  // one target group per piece
};

// Strictly increasing integer sequence given by a closed-form generator.
struct IsetDecl {
    std::string name;
    ExprPtr generator;  // expression in `var`
    std::string var;
    long long k_start = 0;

    bool contains(long long n, const std::map<std::string, double>& consts) const;
    // #(set ∩ [k_start-th value, n]) -- the counting function of the set.
    long long count_leq(long long n, const std::map<std::string, double>& consts) const;
};

struct OrderItem {
    std::vector<std::string> families;  // one family, or an interleaved block
    bool ascending = true;
    bool grouped = false;
};

struct MapSpec {
    ExtInterval space;
    std::vector<std::pair<std::string, ExprPtr>> const_decls;
    std::map<std::string, double> consts;  // resolved, including builtins
    std::vector<IsetDecl> isets;
    std::vector<FamilySpec> families;
    std::vector<OrderItem> order;
    std::vector<TransitionDecl> transitions;
    std::vector<BranchDecl> branches;
    bool piecewise = false;
    std::vector<ExprPtr> fixed_exprs;
    std::vector<double> fixed_points;

    int family_index(std::string_view name) const;  // -1 when absent
    const FamilySpec& family(int f) const { return families[static_cast<size_t>(f)]; }
    const IsetDecl* iset(std::string_view name) const;

    // Raw (pre-subdivision) endpoint evaluation for family f at index i.
    ExtInterval family_interval(int f, long long index) const;
    // Declared accumulation limit of family f in the given index direction.
    std::optional<double> accumulation(int f, bool upward) const;
};

// Identifier of a basic interval of the compiled partition.  `sub` indexes the
// monotone subdivision piece when the compiler split the declared interval
// (-1 when undivided).
struct BasicId {
    int family = -1;
    long long index = 0;
    int sub = -1;

    friend bool operator==(const BasicId&, const BasicId&) = default;
    friend auto operator<=>(const BasicId&, const BasicId&) = default;
};

std::string format_id(const MapSpec& spec, const BasicId& id);
// Inverse of format_id ("A_3", "I_5^1", "D", "I_-2").
BasicId parse_id(const MapSpec& spec, std::string_view text);

// ---------------------------------------------------------------------------
// Parsing / printing / validation.

// Named constants preloaded into every document: sqrt5, b = (sqrt5-1)/2, and
// lambda_min (the real root of x^3-2x^2-x-2).
const std::map<std::string, double>& builtin_constants();

MapSpec parse_spec(std::string_view text);           // SyntaxError / ValidationError
std::string print_spec(const MapSpec& spec);          // canonical document

struct ValidateOptions {
    long long sample_indices = 12;  // indices probed per family
    double tol = 1e-9;
};
void validate_spec(const MapSpec& spec, const ValidateOptions& opt = {});

// ---------------------------------------------------------------------------
// Point evaluation.

// f(x) from the declared branch geometry.  Honors declared fixed points
// exactly; at partition points of a piecewise-continuous map with ambiguous
// one-sided values throws UndefinedAtPartitionPoint.
ExtReal evaluate_map(const MapSpec& spec, ExtReal x);

}  // namespace cpmm

#endif
