#ifndef CPMM_ENTROPY_HPP
#define CPMM_ENTROPY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpmm/transitions.hpp"

namespace cpmm {

// Arbitrary-precision unsigned integer (little-endian base 2^32 limbs).
// First-return counts grow geometrically and overflow 64 bits near n = 73.
class BigUint {
  public:
    BigUint(std::uint64_t v = 0);

    BigUint& operator+=(const BigUint& o);
    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
    friend BigUint operator*(const BigUint& a, const BigUint& b);
    friend bool operator==(const BigUint& a, const BigUint& b) { return a.limbs_ == b.limbs_; }
    friend bool operator<(const BigUint& a, const BigUint& b);
    friend bool operator<=(const BigUint& a, const BigUint& b) { return a < b || a == b; }

    bool zero() const { return limbs_.empty(); }
    double to_double() const;
    std::string str() const;  // decimal

  private:
    std::vector<std::uint32_t> limbs_;
    void trim();
};

// ---------------------------------------------------------------------------

struct LoopCounts {
    BasicId vertex;
    // p[n] = number of length-n loops at the vertex; p[0] = 1
    std::vector<BigUint> p;
};

struct FirstReturnSeries {
    BasicId vertex;
    // f[n] = number of length-n first-return loops; f[0] = 0
    std::vector<BigUint> f;
    int nonzero_terms() const;
};

// Exact loop counts via integer matrix powers over a drift-sound window.
LoopCounts count_loops(const TransitionRuleSet& rules, const BasicId& u, int n_max);

// Exact first-return counts (paths avoiding the vertex internally).
FirstReturnSeries first_returns(const TransitionRuleSet& rules, const BasicId& u, int n_max);

// Two-species population model equivalent to the interval example's
// first-return tree: w(n+3) = w(n+2)+w(n+1)+w(n), w(1)=w(2)=1, w(3)=2, and
// total counts f(n) = w(n) + w(n-2).
struct RabbitModel {
    std::vector<BigUint> w;  // w[n], n >= 1 (w[0] = 0)
    std::vector<BigUint> f;  // f[n], n >= 1
};
RabbitModel rabbit_counts(int n_max);

// ---------------------------------------------------------------------------

struct PhiEstimate {
    double value = 0;     // limsup proxy: max of the tail ratios f(n+1)/f(n)
    double spread_lo = 0; // min/max over the consumed tail
    double spread_hi = 0;
    double root_estimate = 0;  // f(n_max)^(1/n_max), slow but scale-free
};

// Growth-rate estimate of a first-return series; requires >= 10 nonzero terms.
PhiEstimate phi_estimate(const FirstReturnSeries& series);

enum class VereJones { StronglyPositiveRecurrent, RecurrentNotSpr, Transient, Inconclusive };
const char* to_string(VereJones v);

struct VereJonesClass {
    VereJones verdict = VereJones::Inconclusive;
    double partial_sum = 0;             // sum of f(n) phi^-n reached
    std::optional<int> crossing_index;  // first n with partial sum > 1
    std::string evidence;
};

// Partial sums of f(n) phi^-n: crossing 1 certifies strong positive
// recurrence; a plateau clearly below 1 is transient evidence (heuristic tail).
VereJonesClass spr_test(const FirstReturnSeries& series, double phi);

// The lambda solving sum_{n<=n_max} f(n) lambda^-n = 1 by bisection; equals
// the Perron value for recurrent chains, hence exp(entropy).
double perron_from_generating_function(const FirstReturnSeries& series,
                                       std::pair<double, double> bracket);

// ---------------------------------------------------------------------------

// First-return tree: nodes are return paths, children extend the descending
// chain by one step (optionally forking). Level n holds the length-n paths.
struct ReturnTreeNode {
    std::string label;   // path text, e.g. "D A_0 C_1 C_0 D"
    int length = 0;      // path length (tree level)
    int parent = -1;     // index into the node vector
};
std::vector<ReturnTreeNode> first_return_tree(int max_length);

}  // namespace cpmm

#endif
