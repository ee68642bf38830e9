#ifndef CPMM_EXPR_HPP
#define CPMM_EXPR_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpmm/errors.hpp"

namespace cpmm {

// ---------------------------------------------------------------------------
// Tokens shared by the expression parser and the map-spec parser.

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 0;
    int col = 0;

    bool is(Kind k) const { return kind == k; }
    bool is_punct(std::string_view p) const { return kind == Kind::Punct && text == p; }
    bool is_ident(std::string_view s) const { return kind == Kind::Ident && text == s; }
};

// Tokenize one logical line. Recognized punctuation: + - * / ^ ( ) [ ] , ; |
// plus the two-character tokens "->" and ">=".
std::vector<Token> lex_line(std::string_view text, int line_no);

class TokenStream {
  public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
    const Token& peek(int ahead = 0) const;
    Token next();
    bool at_end() const { return pos_ >= toks_.size(); }
    [[noreturn]] void fail(const std::string& msg) const;

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    Token end_{};
};

// ---------------------------------------------------------------------------
// Closed-form expression language for endpoints, constants and index sets:
// literals, named constants, one index variable, + - * / ^ and parentheses.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Name, Add, Sub, Mul, Div, Pow, Neg };
    Kind kind;
    double number = 0;
    std::string text;  // number lexeme or identifier
    ExprPtr a, b;

    static ExprPtr make_number(double v, std::string lexeme);
    static ExprPtr make_name(std::string name);
    static ExprPtr make(Kind k, ExprPtr a, ExprPtr b = nullptr);
};

// Parse a maximal expression from the stream (stops at the first token that
// cannot extend it).
ExprPtr parse_expression(TokenStream& ts);
// Parse a whole string as one expression.
ExprPtr parse_expression(std::string_view text);

struct EvalContext {
    const std::map<std::string, double>* consts = nullptr;
    std::string var;  // index variable name; empty when no variable is bound
    double var_value = 0;

    EvalContext with_var(std::string name, double value) const {
        EvalContext c(*this);
        c.var = std::move(name);
        c.var_value = value;
        return c;
    }
};

double eval(const Expr& e, const EvalContext& ctx);

// Evaluate and require an integer result (tolerance 1e-9).
long long eval_int(const Expr& e, const EvalContext& ctx);

// Canonical rendering: no interior spaces, minimal parentheses.
std::string print(const Expr& e);

inline bool structurally_equal(const Expr& a, const Expr& b) { return print(a) == print(b); }

// Affine form a*var + b with integer coefficients, when the expression has one.
struct AffineIndex {
    long long coef = 0;
    long long offset = 0;
    long long at(long long v) const { return coef * v + offset; }
};
std::optional<AffineIndex> try_affine(const Expr& e, const std::string& var,
                                      const std::map<std::string, double>& consts);

}  // namespace cpmm

#endif
