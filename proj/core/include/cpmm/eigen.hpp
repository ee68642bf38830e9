#ifndef CPMM_EIGEN_HPP
#define CPMM_EIGEN_HPP

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpmm/transitions.hpp"

namespace cpmm {

enum class Summability { Summable, LeftDivergent, RightDivergent, BothDivergent };
const char* to_string(Summability s);

// Candidate eigenvector entries, queryable at any basic id, with closed-form
// family tail sums where the solver knows them.
class EigenEntries {
  public:
    virtual ~EigenEntries() = default;
    virtual double value(const BasicId& id) const = 0;
    // Sum of v over the family's ids with index >= from (upward) or <= from
    // (downward).  Returns +inf for a divergent tail; throws TailNotSummable
    // when no closed form is available.
    virtual double tail_sum(int family, long long from, bool upward) const = 0;
};

struct EigenOutcome {
    enum class Status { ExistsUnique, ExistsFamily, None } status = Status::None;
    int family_dim = 0;
    double lambda = 0;
    std::shared_ptr<const EigenEntries> entries;  // null when Status::None
    Summability summability = Summability::Summable;
    std::string scaling;      // normalization applied to the reported entries
    std::string certificate;  // structural argument behind the verdict
    std::string witness;      // for None: the finite contradiction

    bool exists() const { return status != Status::None; }
};

// --- closed-form and propagation solvers for the gallery systems -----------

// Interval example: full solution family in closed form.  Returns entries for
// lambda at or above the minimal slope; below it, a nonexistence witness.
EigenOutcome solve_s8_closed_form(double lambda);

// Extended-line sawtooth: two-term recurrence propagation from a seed
// (v_{I_1}, v_{I_2}).  Classifies the three spectral regimes.
EigenOutcome propagate_s9(double lambda, std::pair<double, double> seed, int k_range);

// 2x2 one-step matrix of the sawtooth recurrence; det == 1 for every lambda.
struct Mat2 {
    double a, b, c, d;
    double det() const { return a * d - b * c; }
    std::pair<double, double> apply(std::pair<double, double> v) const {
        return {a * v.first + b * v.second, c * v.first + d * v.second};
    }
    Mat2 inverse() const { return Mat2{d, -b, -c, a}; }  // valid when det == 1
};
Mat2 s9_step_matrix(double lambda);

// Dyadic tower: no nonnegative eigenvector at any lambda; produces the
// divergence or partial-sum witness.
EigenOutcome nonexistence_s10(double lambda, int n_max, double bound,
                              std::shared_ptr<const MapSpec> spec = nullptr);

// Piecewise-continuous half-line map at lambda = 2 (the only rule-backed case).
EigenOutcome solve_s11(double lambda = 2.0);

// Reflected non-mixing map at sqrt(lambda) = sqrt(2+sqrt5).
EigenOutcome solve_s12(double sqrt_lambda);

// --- generic machinery ------------------------------------------------------

struct PerronOptions {
    long long iteration_budget = 100000;
    double rayleigh_tol = 1e-12;
    double drift_floor = 1e-6;  // NonConvergence when final drift exceeds this
};

struct PerronEstimate {
    long long window_size = 0;
    double estimate = 0;
    long long iterations = 0;
    double drift = 0;
};

struct PerronResult {
    std::vector<PerronEstimate> sweep;
    std::vector<BasicId> final_window;
    std::vector<double> right_vector;  // of the final window, sup-norm 1
    std::vector<double> left_vector;
    double estimate() const { return sweep.empty() ? 0 : sweep.back().estimate; }
};

// Dominant eigenvalue of nested truncations by power iteration (all-ones
// start); nondecreasing in the window size.
PerronResult truncation_perron(const TransitionRuleSet& rules,
                               const std::vector<long long>& window_sizes,
                               const PerronOptions& opt = {});

// max over I in window of |sum_J T(I,J) v_J - lambda v_I|, with infinite rows
// summed in closed form from the entries' tails.
double residual_check(const TransitionRuleSet& rules, double lambda, const EigenEntries& v,
                      const std::vector<BasicId>& window);

// --- phase-space classification ---------------------------------------------

enum class PhaseVerdict { FiniteInterval, HalfLineLeft, HalfLineRight, FullExtendedLine };
const char* to_string(PhaseVerdict v);

struct PhaseSpaceClass {
    PhaseVerdict verdict = PhaseVerdict::FiniteInterval;
    double left_sum = 0, right_sum = 0;  // +inf when a closed-form tail diverges
    bool left_divergent = false, right_divergent = false;
    std::string evidence;
};

// Partial sums of entries on each side of the basepoint id over the window;
// a side is divergent when its closed-form tail is infinite, or when the
// windowed sums pass `threshold` while still growing at the window edge.
PhaseSpaceClass classify_phase_space(const TransitionRuleSet& rules, const EigenEntries& v,
                                     const BasicId& basepoint, double threshold, const Window& w);

}  // namespace cpmm

#endif
