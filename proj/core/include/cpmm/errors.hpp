#ifndef CPMM_ERRORS_HPP
#define CPMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cpmm {

// Arithmetic on the extended line hit an indeterminate form (inf - inf, 0 * inf).
struct IndeterminateForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : std::runtime_error {
    int line = 0;
    int column = 0;
    SyntaxError(int line_, int column_, const std::string& what_)
        : std::runtime_error("syntax error at " + std::to_string(line_) + ":" +
                             std::to_string(column_) + ": " + what_),
          line(line_), column(column_) {}
};

enum class ValidationKind {
    OverlappingIntervals,
    NonMarkovImage,
    EndpointEscapesPartition,
    DegenerateInterval,
    OrderMismatch,
    RuleConflict,
    RuleGap,
    DiscontinuousBranch,
    BadDeclaration,
};

const char* to_string(ValidationKind k);

struct ValidationError : std::runtime_error {
    ValidationKind kind;
    ValidationError(ValidationKind kind_, const std::string& what_)
        : std::runtime_error(std::string(to_string(kind_)) + ": " + what_), kind(kind_) {}
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedAtPartitionPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnboundedDrift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TailNotSummable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The defining sum of the conjugacy diverged inside the window; carries the
// partial sum reached and the number of terms consumed.
struct TailDivergence : std::runtime_error {
    double partial_sum = 0;
    long long terms = 0;
    TailDivergence(const std::string& what_, double partial, long long n)
        : std::runtime_error(what_), partial_sum(partial), terms(n) {}
};

struct DepthExplosion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cpmm

#endif
