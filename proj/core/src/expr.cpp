#include "cpmm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace cpmm {

std::vector<Token> lex_line(std::string_view text, int line_no) {
    std::vector<Token> out;
    size_t i = 0;
    auto push = [&](Token::Kind k, std::string s, size_t col) {
        out.push_back(Token{k, std::move(s), line_no, static_cast<int>(col) + 1});
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') break;  // comment to end of line
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            push(Token::Kind::Ident, std::string(text.substr(start, i - start)), start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            bool seen_dot = false, seen_exp = false;
            while (i < text.size()) {
                char d = text[i];
                if (std::isdigit(static_cast<unsigned char>(d))) { ++i; continue; }
                if (d == '.' && !seen_dot && !seen_exp) { seen_dot = true; ++i; continue; }
                if ((d == 'e' || d == 'E') && !seen_exp && i + 1 < text.size() &&
                    (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                     ((text[i + 1] == '+' || text[i + 1] == '-') && i + 2 < text.size() &&
                      std::isdigit(static_cast<unsigned char>(text[i + 2]))))) {
                    seen_exp = true;
                    i += (text[i + 1] == '+' || text[i + 1] == '-') ? 2 : 1;
                    continue;
                }
                break;
            }
            push(Token::Kind::Number, std::string(text.substr(start, i - start)), start);
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            push(Token::Kind::Punct, "->", start);
            i += 2;
            continue;
        }
        if (c == '>' && i + 1 < text.size() && text[i + 1] == '=') {
            push(Token::Kind::Punct, ">=", start);
            i += 2;
            continue;
        }
        if (std::string_view("+-*/^()[],;|=_").find(c) != std::string_view::npos) {
            push(Token::Kind::Punct, std::string(1, c), start);
            ++i;
            continue;
        }
        throw SyntaxError(line_no, static_cast<int>(start) + 1,
                          std::string("unexpected character '") + c + "'");
    }
    return out;
}

const Token& TokenStream::peek(int ahead) const {
    size_t p = pos_ + static_cast<size_t>(ahead);
    return p < toks_.size() ? toks_[p] : end_;
}

Token TokenStream::next() {
    if (pos_ >= toks_.size()) return end_;
    return toks_[pos_++];
}

void TokenStream::fail(const std::string& msg) const {
    const Token& t = peek();
    int line = t.kind == Token::Kind::End && !toks_.empty() ? toks_.back().line : t.line;
    int col = t.kind == Token::Kind::End && !toks_.empty() ? toks_.back().col + 1 : t.col;
    throw SyntaxError(line, col, msg);
}

// ---------------------------------------------------------------------------

ExprPtr Expr::make_number(double v, std::string lexeme) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Number;
    e->number = v;
    e->text = std::move(lexeme);
    return e;
}

ExprPtr Expr::make_name(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Name;
    e->text = std::move(name);
    return e;
}

ExprPtr Expr::make(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

namespace {

// precedence climbing; '^' is right-associative and binds tighter than unary minus
ExprPtr parse_primary(TokenStream& ts);

ExprPtr parse_pow(TokenStream& ts) {
    ExprPtr base = parse_primary(ts);
    if (ts.peek().is_punct("^")) {
        ts.next();
        ExprPtr exp = ts.peek().is_punct("-")
                          ? (ts.next(), Expr::make(Expr::Kind::Neg, parse_pow(ts)))
                          : parse_pow(ts);
        return Expr::make(Expr::Kind::Pow, std::move(base), std::move(exp));
    }
    return base;
}

ExprPtr parse_unary(TokenStream& ts) {
    if (ts.peek().is_punct("-")) {
        ts.next();
        return Expr::make(Expr::Kind::Neg, parse_unary(ts));
    }
    return parse_pow(ts);
}

ExprPtr parse_mul(TokenStream& ts) {
    ExprPtr lhs = parse_unary(ts);
    for (;;) {
        if (ts.peek().is_punct("*")) {
            ts.next();
            lhs = Expr::make(Expr::Kind::Mul, std::move(lhs), parse_unary(ts));
        } else if (ts.peek().is_punct("/")) {
            ts.next();
            lhs = Expr::make(Expr::Kind::Div, std::move(lhs), parse_unary(ts));
        } else {
            return lhs;
        }
    }
}

ExprPtr parse_add(TokenStream& ts) {
    ExprPtr lhs = parse_mul(ts);
    for (;;) {
        if (ts.peek().is_punct("+")) {
            ts.next();
            lhs = Expr::make(Expr::Kind::Add, std::move(lhs), parse_mul(ts));
        } else if (ts.peek().is_punct("-")) {
            ts.next();
            lhs = Expr::make(Expr::Kind::Sub, std::move(lhs), parse_mul(ts));
        } else {
            return lhs;
        }
    }
}

bool reserved_keyword(const std::string& s) {
    static const std::set<std::string> kw = {
        "space",    "const",       "iset",   "family", "order",  "branch", "transition",
        "continuity", "fixed",     "index",  "endpoints", "accumulates", "orient",
        "pieces",   "slopes",      "targets", "for",   "in",     "notin",  "all"};
    return kw.count(s) > 0;
}

ExprPtr parse_primary(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.is(Token::Kind::Number)) {
        Token tok = ts.next();
        return Expr::make_number(std::strtod(tok.text.c_str(), nullptr), tok.text);
    }
    if (t.is(Token::Kind::Ident)) {
        if (reserved_keyword(t.text)) ts.fail("keyword '" + t.text + "' cannot start a value");
        Token tok = ts.next();
        return Expr::make_name(tok.text);
    }
    if (t.is_punct("(")) {
        ts.next();
        ExprPtr inner = parse_add(ts);
        if (!ts.peek().is_punct(")")) ts.fail("expected ')'");
        ts.next();
        return inner;
    }
    ts.fail("expected a number, name or '('");
}

}  // namespace

ExprPtr parse_expression(TokenStream& ts) { return parse_add(ts); }

ExprPtr parse_expression(std::string_view text) {
    TokenStream ts(lex_line(text, 1));
    ExprPtr e = parse_expression(ts);
    if (!ts.at_end()) ts.fail("trailing input after expression");
    return e;
}

double eval(const Expr& e, const EvalContext& ctx) {
    switch (e.kind) {
        case Expr::Kind::Number:
            return e.number;
        case Expr::Kind::Name: {
            if (!ctx.var.empty() && e.text == ctx.var) return ctx.var_value;
            if (e.text == "inf") return std::numeric_limits<double>::infinity();
            if (ctx.consts) {
                auto it = ctx.consts->find(e.text);
                if (it != ctx.consts->end()) return it->second;
            }
            throw DomainError("unknown name '" + e.text + "' in expression");
        }
        case Expr::Kind::Add: {
            double r = eval(*e.a, ctx) + eval(*e.b, ctx);
            if (std::isnan(r)) throw IndeterminateForm("inf - inf while evaluating expression");
            return r;
        }
        case Expr::Kind::Sub: {
            double r = eval(*e.a, ctx) - eval(*e.b, ctx);
            if (std::isnan(r)) throw IndeterminateForm("inf - inf while evaluating expression");
            return r;
        }
        case Expr::Kind::Mul: {
            double r = eval(*e.a, ctx) * eval(*e.b, ctx);
            if (std::isnan(r)) throw IndeterminateForm("0 * inf while evaluating expression");
            return r;
        }
        case Expr::Kind::Div: {
            double num = eval(*e.a, ctx), den = eval(*e.b, ctx);
            if (den == 0) throw DomainError("division by zero in expression");
            double r = num / den;
            if (std::isnan(r)) throw IndeterminateForm("inf / inf while evaluating expression");
            return r;
        }
        case Expr::Kind::Pow: {
            double base = eval(*e.a, ctx), exp = eval(*e.b, ctx);
            double r = std::pow(base, exp);
            if (std::isnan(r)) throw DomainError("invalid power in expression");
            return r;
        }
        case Expr::Kind::Neg:
            return -eval(*e.a, ctx);
    }
    throw DomainError("corrupt expression");
}

long long eval_int(const Expr& e, const EvalContext& ctx) {
    double v = eval(e, ctx);
    double r = std::round(v);
    if (!(std::fabs(v - r) < 1e-9) || std::fabs(r) > 9e15)
        throw DomainError("expression '" + print(e) + "' is not an integer");
    return static_cast<long long>(r);
}

namespace {

int level(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const Expr& e, std::string& out, int min_level) {
    bool paren = level(e) < min_level;
    if (paren) out += '(';
    switch (e.kind) {
        case Expr::Kind::Number: out += e.text; break;
        case Expr::Kind::Name: out += e.text; break;
        case Expr::Kind::Add:
            print_rec(*e.a, out, 1);
            out += '+';
            print_rec(*e.b, out, 2);
            break;
        case Expr::Kind::Sub:
            print_rec(*e.a, out, 1);
            out += '-';
            print_rec(*e.b, out, 2);
            break;
        case Expr::Kind::Mul:
            print_rec(*e.a, out, 2);
            out += '*';
            print_rec(*e.b, out, 3);
            break;
        case Expr::Kind::Div:
            print_rec(*e.a, out, 2);
            out += '/';
            print_rec(*e.b, out, 3);
            break;
        case Expr::Kind::Neg:
            out += '-';
            print_rec(*e.a, out, 3);
            break;
        case Expr::Kind::Pow:
            print_rec(*e.a, out, 5);
            out += '^';
            print_rec(*e.b, out, 5);
            break;
    }
    if (paren) out += ')';
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    print_rec(e, out, 0);
    return out;
}

namespace {

struct Rat {
    long long num = 0, den = 1;
};

std::optional<Rat> as_rat(double v) {
    double r = std::round(v);
    if (std::fabs(v - r) < 1e-12 && std::fabs(r) < 9e15) return Rat{(long long)r, 1};
    return std::nullopt;
}

struct AffRat {
    Rat a, b;  // a*var + b
};

long long gcd_ll(long long a, long long b) {
    while (b) { long long t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
}

Rat norm(Rat r) {
    if (r.den < 0) { r.den = -r.den; r.num = -r.num; }
    long long g = gcd_ll(r.num, r.den);
    if (g > 1) { r.num /= g; r.den /= g; }
    return r;
}

Rat add(Rat x, Rat y) { return norm({x.num * y.den + y.num * x.den, x.den * y.den}); }
Rat mul(Rat x, Rat y) { return norm({x.num * y.num, x.den * y.den}); }
Rat neg(Rat x) { return {-x.num, x.den}; }

std::optional<AffRat> aff(const Expr& e, const std::string& var,
                          const std::map<std::string, double>& consts) {
    switch (e.kind) {
        case Expr::Kind::Number: {
            auto r = as_rat(e.number);
            if (!r) return std::nullopt;
            return AffRat{{0, 1}, *r};
        }
        case Expr::Kind::Name: {
            if (e.text == var) return AffRat{{1, 1}, {0, 1}};
            auto it = consts.find(e.text);
            if (it == consts.end()) return std::nullopt;
            auto r = as_rat(it->second);
            if (!r) return std::nullopt;
            return AffRat{{0, 1}, *r};
        }
        case Expr::Kind::Neg: {
            auto x = aff(*e.a, var, consts);
            if (!x) return std::nullopt;
            return AffRat{neg(x->a), neg(x->b)};
        }
        case Expr::Kind::Add:
        case Expr::Kind::Sub: {
            auto x = aff(*e.a, var, consts), y = aff(*e.b, var, consts);
            if (!x || !y) return std::nullopt;
            if (e.kind == Expr::Kind::Sub) *y = {neg(y->a), neg(y->b)};
            return AffRat{add(x->a, y->a), add(x->b, y->b)};
        }
        case Expr::Kind::Mul: {
            auto x = aff(*e.a, var, consts), y = aff(*e.b, var, consts);
            if (!x || !y) return std::nullopt;
            bool xconst = x->a.num == 0, yconst = y->a.num == 0;
            if (!xconst && !yconst) return std::nullopt;
            if (!xconst) std::swap(x, y);
            return AffRat{mul(x->b, y->a), mul(x->b, y->b)};
        }
        case Expr::Kind::Div: {
            auto x = aff(*e.a, var, consts), y = aff(*e.b, var, consts);
            if (!x || !y || y->a.num != 0 || y->b.num == 0) return std::nullopt;
            Rat inv{y->b.den, y->b.num};
            return AffRat{mul(x->a, inv), mul(x->b, inv)};
        }
        default:
            return std::nullopt;
    }
}

}  // namespace

std::optional<AffineIndex> try_affine(const Expr& e, const std::string& var,
                                      const std::map<std::string, double>& consts) {
    auto r = aff(e, var, consts);
    if (!r) return std::nullopt;
    Rat a = norm(r->a), b = norm(r->b);
    if (a.den != 1 || b.den != 1) return std::nullopt;
    return AffineIndex{a.num, b.num};
}

}  // namespace cpmm
