#ifndef CPMM_TRANSITIONS_HPP
#define CPMM_TRANSITIONS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpmm/mapspec.hpp"

namespace cpmm {

// A maximal run of column ids hit by one row: every subdivision piece of every
// index in [lo, hi] of `family` (hi absent = unbounded tail).
struct TargetSpan {
    int family = -1;
    long long lo = 0;
    std::optional<long long> hi;
    // Sub-matched single target (s10-style slope-preserving subdivision):
    // when sub >= 0 the span is the single id (family, lo, sub).
    int sub = -1;
};

// One affine monotone piece of a branch over a basic id.
struct AffinePiece {
    double x_lo = 0, x_hi = 0;  // domain cell
    double y_lo = 0, y_hi = 0;  // image interval
    double slope = 0;           // signed; |slope| = (y_hi-y_lo)/(x_hi-x_lo)

    double at(double x) const { return slope > 0 ? y_lo + slope * (x - x_lo) : y_hi + slope * (x - x_lo); }
    double inverse(double y) const {
        return slope > 0 ? x_lo + (y - y_lo) / slope : x_lo + (y - y_hi) / slope;
    }
};

struct BranchGeometry {
    std::vector<AffinePiece> pieces;
    double min_abs_slope() const;
};

struct FiniteMatrix {
    std::vector<BasicId> labels;
    std::vector<std::vector<int>> entries;  // 0/1, entries[row][col]
};

struct DriftBounds {
    std::optional<long long> symmetric;  // max |index change| over all transitions
    std::optional<long long> descent;    // max single-step drop in index potential
    std::optional<long long> ascent;     // max single-step rise
};

struct MixingReport {
    enum class Verdict { LikelyMixing, NotMixingWitness, Inconclusive } verdict;
    std::optional<int> period;  // for NotMixingWitness with a period certificate
    std::string witness;        // human-readable evidence; heuristic, never a proof
};

// Compiled, queryable form of the countable 0-1 transition structure.
class TransitionRuleSet {
  public:
    explicit TransitionRuleSet(std::shared_ptr<const MapSpec> spec);

    const MapSpec& spec() const { return *spec_; }
    std::shared_ptr<const MapSpec> spec_ptr() const { return spec_; }

    // Number of monotone subdivision pieces of the declared interval
    // (family, index); 1 when the compiler kept it whole.
    int sub_count(int family, long long index) const;

    // All basic ids of the compiled partition for the declared id.
    std::vector<BasicId> pieces_of(int family, long long index) const;

    // Row of the countable matrix, as spans.
    std::vector<TargetSpan> row(const BasicId& id) const;

    // T(I, J) = 1 iff the branch image of I contains J.
    bool entry(const BasicId& I, const BasicId& J) const;

    // Geometry of the branch over a basic id (realized affine pieces).
    BranchGeometry geometry(const BasicId& id) const;

    // Interval occupied by a basic id.
    ExtInterval interval(const BasicId& id) const;

    // Principal submatrix on the given window of ids.
    FiniteMatrix truncate(const std::vector<BasicId>& window) const;

    DriftBounds drift() const;

    // Sound id window for counting loops of length <= n_max at u.
    std::vector<BasicId> loop_window(const BasicId& u, int n_max) const;

    // Canonical nested windows for truncation experiments: roughly n ids,
    // allocated evenly across families near index 0.
    std::vector<BasicId> window_by_size(long long n) const;

  private:
    std::shared_ptr<const MapSpec> spec_;
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

TransitionRuleSet compile_transitions(std::shared_ptr<const MapSpec> spec);

// ---------------------------------------------------------------------------
// Finite views of the phase space.

struct Window {
    double lo = 0, hi = 0;      // coordinates; should be partition points
    long long index_cap = 24;   // per-family |index| cap
};

struct TailPart {
    int family = -1;
    long long from = 0;
    bool upward = true;  // ids with index >= from (else <= from)
};

struct UniverseSegment {
    enum class Kind { Id, Gap } kind = Kind::Id;
    double lo = 0, hi = 0;
    BasicId id;                   // Kind::Id
    std::vector<TailPart> tails;  // Kind::Gap: the ids hiding inside
};

// Ordered decomposition of [w.lo, w.hi] into basic-interval segments and
// accumulation gaps (ids beyond the index cap).
std::vector<UniverseSegment> enumerate_universe(const TransitionRuleSet& rules, const Window& w);

// ---------------------------------------------------------------------------

// Heuristic mixing check: strong connectivity + aperiodicity of the truncated
// graph + uniform expansion, with structural non-mixing certificates
// (bipartite family classes; globally index-decreasing rules).
MixingReport mixing_heuristic(const TransitionRuleSet& rules, int window_size);

}  // namespace cpmm

#endif
