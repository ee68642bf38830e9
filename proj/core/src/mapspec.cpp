#include "cpmm/mapspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "cpmm/roots.hpp"
#include "spec_internal.hpp"

namespace cpmm {

namespace {

std::string g12(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

const std::map<std::string, double>& builtin_constants() {
    static const std::map<std::string, double> k = [] {
        std::map<std::string, double> m;
        m["sqrt5"] = std::sqrt(5.0);
        m["b"] = (std::sqrt(5.0) - 1.0) / 2.0;
        m["lambda_min"] = min_slope_root();
        return m;
    }();
    return k;
}

int MapSpec::family_index(std::string_view name) const {
    for (size_t i = 0; i < families.size(); ++i)
        if (families[i].name == name) return static_cast<int>(i);
    return -1;
}

const IsetDecl* MapSpec::iset(std::string_view name) const {
    for (const auto& s : isets)
        if (s.name == name) return &s;
    return nullptr;
}

ExtInterval MapSpec::family_interval(int f, long long index) const {
    const FamilySpec& fam = family(f);
    EvalContext ctx{&consts, "i", static_cast<double>(index)};
    double lo = eval(*fam.lo, ctx);
    double hi = eval(*fam.hi, ctx);
    if (!(lo < hi))
        throw ValidationError(ValidationKind::DegenerateInterval,
                              fam.name + "_" + std::to_string(index) + " has lo >= hi");
    return ExtInterval(ExtReal(lo), ExtReal(hi));
}

std::optional<double> MapSpec::accumulation(int f, bool upward) const {
    const FamilySpec& fam = family(f);
    EvalContext ctx{&consts, "", 0};
    if (fam.range == IndexRange::Singleton || fam.accumulates.empty()) return std::nullopt;
    if (fam.range == IndexRange::Naturals) {
        if (!upward) return std::nullopt;
        return eval(*fam.accumulates.front(), ctx);
    }
    // integers: first value is the i -> -inf limit, second the i -> +inf limit
    if (fam.accumulates.size() < 2) return std::nullopt;
    return eval(*fam.accumulates[upward ? 1 : 0], ctx);
}

std::optional<long long> SourcePattern::match(long long index) const {
    long long v = 0;
    switch (kind) {
        case Kind::Singleton: v = 0; break;
        case Kind::Literal:
            if (index != literal) return std::nullopt;
            v = literal;
            break;
        case Kind::Var: {
            long long r = index - off;
            if (r % coef != 0) return std::nullopt;
            v = r / coef;
            break;
        }
    }
    if (guard_ge && v < *guard_ge) return std::nullopt;
    return v;
}

bool IsetDecl::contains(long long n, const std::map<std::string, double>& consts) const {
    EvalContext ctx{&consts, var, 0};
    long long k = k_start;
    for (;;) {
        ctx.var_value = static_cast<double>(k);
        long long value = eval_int(*generator, ctx);
        if (value == n) return true;
        if (value > n) return false;
        ++k;
        if (k - k_start > 4000000) throw DomainError("iset scan exceeded 4e6 terms");
    }
}

long long IsetDecl::count_leq(long long n, const std::map<std::string, double>& consts) const {
    EvalContext ctx{&consts, var, 0};
    long long k = k_start, count = 0;
    for (;;) {
        ctx.var_value = static_cast<double>(k);
        if (eval_int(*generator, ctx) > n) return count;
        ++count;
        ++k;
        if (k - k_start > 4000000) throw DomainError("iset scan exceeded 4e6 terms");
    }
}

std::string format_id(const MapSpec& spec, const BasicId& id) {
    const FamilySpec& fam = spec.family(id.family);
    std::string s = fam.name;
    if (fam.range != IndexRange::Singleton) {
        s += "_" + std::to_string(id.index);
    }
    if (id.sub >= 0) s += "^" + std::to_string(id.sub);
    return s;
}

BasicId parse_id(const MapSpec& spec, std::string_view text) {
    BasicId id;
    size_t us = text.find('_');
    std::string fam(text.substr(0, us == std::string_view::npos ? text.size() : us));
    id.family = spec.family_index(fam);
    if (id.family < 0) throw DomainError("unknown family in id '" + std::string(text) + "'");
    if (us != std::string_view::npos) {
        std::string_view rest = text.substr(us + 1);
        size_t caret = rest.find('^');
        std::string idx(rest.substr(0, caret == std::string_view::npos ? rest.size() : caret));
        id.index = std::stoll(idx);
        if (caret != std::string_view::npos) id.sub = std::stoi(std::string(rest.substr(caret + 1)));
    }
    return id;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct LineParser {
    MapSpec spec;
    bool saw_space = false;
    bool saw_continuity = false;

    std::string expect_ident(TokenStream& ts, const char* what) {
        if (!ts.peek().is(Token::Kind::Ident)) ts.fail(std::string("expected ") + what);
        return ts.next().text;
    }

    void expect_punct(TokenStream& ts, const char* p) {
        if (!ts.peek().is_punct(p)) ts.fail(std::string("expected '") + p + "'");
        ts.next();
    }

    long long expect_int(TokenStream& ts) {
        bool negated = false;
        if (ts.peek().is_punct("-")) { ts.next(); negated = true; }
        if (!ts.peek().is(Token::Kind::Number)) ts.fail("expected an integer");
        Token t = ts.next();
        long long v = std::strtoll(t.text.c_str(), nullptr, 10);
        return negated ? -v : v;
    }

    double eval_const_expr(TokenStream& ts) {
        ExprPtr e = parse_expression(ts);
        EvalContext ctx{&spec.consts, "", 0};
        return eval(*e, ctx);
    }

    // Pattern variable discovery: the single free name of an expression.
    std::string free_var(const Expr& e) {
        std::string found;
        std::function<void(const Expr&)> walk = [&](const Expr& x) {
            if (x.kind == Expr::Kind::Name) {
                if (x.text != "inf" && !spec.consts.count(x.text)) {
                    if (!found.empty() && found != x.text)
                        throw DomainError("expression uses two variables: " + found + ", " + x.text);
                    found = x.text;
                }
            }
            if (x.a) walk(*x.a);
            if (x.b) walk(*x.b);
        };
        walk(e);
        return found;
    }

    SourcePattern parse_pattern(TokenStream& ts) {
        if (!ts.peek().is(Token::Kind::Ident)) ts.fail("expected a source pattern");
        Token t = ts.next();
        SourcePattern p;
        size_t us = t.text.find('_');
        if (us == std::string::npos) {
            p.family = t.text;
            p.kind = SourcePattern::Kind::Singleton;
            return p;
        }
        p.family = t.text.substr(0, us);
        std::string sub = t.text.substr(us + 1);
        if (sub.empty()) {
            // F_( expr )
            expect_punct(ts, "(");
            ExprPtr e = parse_expression(ts);
            expect_punct(ts, ")");
            std::string v = free_var(*e);
            if (v.empty()) {
                EvalContext ctx{&spec.consts, "", 0};
                p.kind = SourcePattern::Kind::Literal;
                p.literal = eval_int(*e, ctx);
                return p;
            }
            auto affine = try_affine(*e, v, spec.consts);
            if (!affine || (affine->coef != 1 && affine->coef != 2) || affine->offset < 0 ||
                affine->offset >= affine->coef)
                ts.fail("source pattern index must be v, 2*v or 2*v+1");
            p.kind = SourcePattern::Kind::Var;
            p.var = v;
            p.coef = affine->coef;
            p.off = affine->offset;
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(sub[0])) || sub[0] == '-') {
            p.kind = SourcePattern::Kind::Literal;
            p.literal = std::strtoll(sub.c_str(), nullptr, 10);
            return p;
        }
        p.kind = SourcePattern::Kind::Var;
        p.var = sub;
        return p;
    }

    void parse_source_guard(TokenStream& ts, SourcePattern& p) {
        if (ts.peek().is_ident("for")) {
            ts.next();
            std::string v = expect_ident(ts, "guard variable");
            if (p.kind != SourcePattern::Kind::Var || v != p.var)
                ts.fail("guard variable does not match the pattern");
            expect_punct(ts, ">=");
            p.guard_ge = expect_int(ts);
        }
    }

    TargetAtom parse_atom(TokenStream& ts, const SourcePattern& src) {
        if (!ts.peek().is(Token::Kind::Ident)) ts.fail("expected a target");
        Token t = ts.next();
        TargetAtom a;
        if (t.text == "all") {
            a.kind = TargetAtom::Kind::All;
            return a;
        }
        size_t us = t.text.find('_');
        if (us == std::string::npos) {
            a.family = t.text;
            a.kind = TargetAtom::Kind::Singleton;
            return a;
        }
        a.family = t.text.substr(0, us);
        std::string sub = t.text.substr(us + 1);
        ExprPtr idx;
        if (sub.empty()) {
            expect_punct(ts, "(");
            idx = parse_expression(ts);
            expect_punct(ts, ")");
        } else if (std::isdigit(static_cast<unsigned char>(sub[0])) || sub[0] == '-') {
            idx = Expr::make_number(std::strtod(sub.c_str(), nullptr), sub);
        } else {
            idx = Expr::make_name(sub);
        }
        // Range form: F_j for j >= e / for j in [e, e]
        if (idx->kind == Expr::Kind::Name && ts.peek().is_ident("for") &&
            ts.peek(1).is_ident(idx->text)) {
            ts.next();  // for
            ts.next();  // var
            a.range_var = idx->text;
            if (ts.peek().is_punct(">=")) {
                ts.next();
                a.kind = TargetAtom::Kind::Ray;
                a.lo = parse_expression(ts);
            } else if (ts.peek().is_ident("in")) {
                ts.next();
                expect_punct(ts, "[");
                a.kind = TargetAtom::Kind::Range;
                a.lo = parse_expression(ts);
                expect_punct(ts, ",");
                a.hi = parse_expression(ts);
                expect_punct(ts, "]");
            } else {
                ts.fail("expected '>=' or 'in' after range variable");
            }
            return a;
        }
        a.kind = TargetAtom::Kind::Single;
        a.single = idx;
        // a bare variable that is not the pattern variable is an error
        if (idx->kind == Expr::Kind::Name && !spec.consts.count(idx->text) &&
            (src.kind != SourcePattern::Kind::Var || idx->text != src.var))
            ts.fail("unknown index variable '" + idx->text + "' in target");
        return a;
    }

    void parse_line(TokenStream& ts) {
        std::string kw = expect_ident(ts, "a declaration keyword");
        if (kw == "space") {
            double lo = eval_const_expr(ts);
            double hi = eval_const_expr(ts);
            spec.space = ExtInterval(ExtReal(lo), ExtReal(hi));
            saw_space = true;
        } else if (kw == "const") {
            std::string name = expect_ident(ts, "constant name");
            expect_punct(ts, "=");
            ExprPtr e = parse_expression(ts);
            if (spec.consts.count(name))
                throw ValidationError(ValidationKind::BadDeclaration,
                                      "constant '" + name + "' redeclared");
            EvalContext ctx{&spec.consts, "", 0};
            spec.consts[name] = eval(*e, ctx);
            spec.const_decls.emplace_back(name, e);
        } else if (kw == "iset") {
            IsetDecl d;
            d.name = expect_ident(ts, "set name");
            expect_punct(ts, "=");
            d.generator = parse_expression(ts);
            if (!ts.peek().is_ident("for")) ts.fail("expected 'for' in iset declaration");
            ts.next();
            d.var = expect_ident(ts, "iset variable");
            expect_punct(ts, ">=");
            d.k_start = expect_int(ts);
            spec.isets.push_back(std::move(d));
        } else if (kw == "family") {
            FamilySpec f;
            f.name = expect_ident(ts, "family name");
            if (f.name.find('_') != std::string::npos)
                throw ValidationError(ValidationKind::BadDeclaration,
                                      "family names may not contain '_'");
            if (!ts.peek().is_ident("index")) ts.fail("expected 'index'");
            ts.next();
            std::string r = expect_ident(ts, "index range");
            if (r == "naturals") f.range = IndexRange::Naturals;
            else if (r == "integers") f.range = IndexRange::Integers;
            else if (r == "singleton") f.range = IndexRange::Singleton;
            else ts.fail("index range must be naturals, integers or singleton");
            if (!ts.peek().is_ident("endpoints")) ts.fail("expected 'endpoints'");
            ts.next();
            f.lo = parse_expression(ts);
            f.hi = parse_expression(ts);
            if (ts.peek().is_ident("accumulates")) {
                ts.next();
                f.accumulates.push_back(parse_expression(ts));
                if (!ts.at_end() && !ts.peek().is_ident("orient"))
                    f.accumulates.push_back(parse_expression(ts));
            }
            if (ts.peek().is_ident("orient")) {
                ts.next();
                std::string o = expect_ident(ts, "orientation");
                if (o == "up") f.orient = Orient::Up;
                else if (o == "down") f.orient = Orient::Down;
                else if (o == "even_up") f.orient = Orient::EvenUp;
                else if (o == "even_down") f.orient = Orient::EvenDown;
                else ts.fail("orientation must be up, down, even_up or even_down");
            }
            spec.families.push_back(std::move(f));
        } else if (kw == "order") {
            while (!ts.at_end()) {
                OrderItem item;
                if (ts.peek().is_punct("(")) {
                    ts.next();
                    item.grouped = true;
                    while (ts.peek().is(Token::Kind::Ident)) item.families.push_back(ts.next().text);
                    expect_punct(ts, ")");
                } else {
                    item.families.push_back(expect_ident(ts, "family name in order"));
                }
                if (ts.peek().is_punct("+")) { ts.next(); item.ascending = true; }
                else if (ts.peek().is_punct("-")) { ts.next(); item.ascending = false; }
                spec.order.push_back(std::move(item));
            }
        } else if (kw == "transition") {
            TransitionDecl d;
            d.src = parse_pattern(ts);
            parse_source_guard(ts, d.src);
            expect_punct(ts, "->");
            d.targets.push_back(parse_atom(ts, d.src));
            while (ts.peek().is_punct("|")) {
                ts.next();
                d.targets.push_back(parse_atom(ts, d.src));
            }
            if (!ts.at_end()) ts.fail("trailing input after transition targets");
            spec.transitions.push_back(std::move(d));
        } else if (kw == "branch") {
            BranchDecl d;
            d.src = parse_pattern(ts);
            if (ts.peek().is_ident("in") || ts.peek().is_ident("notin")) {
                d.set_guard = ts.peek().is_ident("in") ? BranchDecl::SetGuard::In
                                                       : BranchDecl::SetGuard::NotIn;
                ts.next();
                d.iset = expect_ident(ts, "set name");
                if (!spec.iset(d.iset))
                    throw ValidationError(ValidationKind::BadDeclaration,
                                          "unknown iset '" + d.iset + "'");
            }
            parse_source_guard(ts, d.src);
            if (!ts.peek().is_ident("pieces")) ts.fail("expected 'pieces'");
            ts.next();
            long long n = expect_int(ts);
            if (n < 1 || n > 64) ts.fail("piece count out of range");
            if (!ts.peek().is_ident("slopes")) ts.fail("expected 'slopes'");
            ts.next();
            d.slopes.push_back(parse_expression(ts));
            while (ts.peek().is_punct(",")) {
                ts.next();
                d.slopes.push_back(parse_expression(ts));
            }
            if (static_cast<long long>(d.slopes.size()) != n)
                ts.fail("slope count does not match pieces");
            if (!ts.peek().is_ident("targets")) ts.fail("expected 'targets'");
            ts.next();
            d.piece_targets.push_back(parse_atom(ts, d.src));
            while (ts.peek().is_punct(";")) {
                ts.next();
                d.piece_targets.push_back(parse_atom(ts, d.src));
            }
            if (static_cast<long long>(d.piece_targets.size()) != n)
                ts.fail("target group count does not match pieces");
            spec.branches.push_back(std::move(d));
        } else if (kw == "continuity") {
            std::string c = expect_ident(ts, "continuity mode");
            if (c == "global") spec.piecewise = false;
            else if (c == "piecewise") spec.piecewise = true;
            else ts.fail("continuity must be global or piecewise");
            saw_continuity = true;
        } else if (kw == "fixed") {
            ExprPtr e = parse_expression(ts);
            EvalContext ctx{&spec.consts, "", 0};
            spec.fixed_points.push_back(eval(*e, ctx));
            spec.fixed_exprs.push_back(e);
        } else {
            ts.fail("unknown declaration '" + kw + "'");
        }
        if (!ts.at_end()) ts.fail("trailing input after declaration");
    }
};

}  // namespace

MapSpec parse_spec(std::string_view text) {
    LineParser p;
    p.spec.consts = builtin_constants();

    int line_no = 0;
    size_t pos = 0;
    bool any = false;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        ++line_no;
        std::vector<Token> toks = lex_line(line, line_no);
        if (!toks.empty()) {
            any = true;
            TokenStream ts(std::move(toks));
            p.parse_line(ts);
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (!any) throw SyntaxError(1, 1, "empty document");
    if (!p.saw_space) throw SyntaxError(line_no, 1, "missing 'space' declaration");
    if (p.spec.families.empty()) throw SyntaxError(line_no, 1, "no family declarations");

    validate_spec(p.spec);
    return p.spec;
}

// ---------------------------------------------------------------------------
// Canonical printing

namespace {

std::string print_pattern(const SourcePattern& p) {
    switch (p.kind) {
        case SourcePattern::Kind::Singleton: return p.family;
        case SourcePattern::Kind::Literal:
            if (p.literal < 0) return p.family + "_(" + std::to_string(p.literal) + ")";
            return p.family + "_" + std::to_string(p.literal);
        case SourcePattern::Kind::Var:
            if (p.coef == 1) return p.family + "_" + p.var;
            return p.family + "_(" + std::to_string(p.coef) + "*" + p.var +
                   (p.off ? "+" + std::to_string(p.off) : "") + ")";
    }
    return p.family;
}

std::string print_atom(const TargetAtom& a) {
    switch (a.kind) {
        case TargetAtom::Kind::All: return "all";
        case TargetAtom::Kind::Singleton: return a.family;
        case TargetAtom::Kind::Single: {
            const Expr& e = *a.single;
            if (e.kind == Expr::Kind::Name) return a.family + "_" + e.text;
            if (e.kind == Expr::Kind::Number && e.number >= 0) return a.family + "_" + e.text;
            return a.family + "_(" + print(e) + ")";
        }
        case TargetAtom::Kind::Ray:
            return a.family + "_" + a.range_var + " for " + a.range_var + " >= " + print(*a.lo);
        case TargetAtom::Kind::Range:
            return a.family + "_" + a.range_var + " for " + a.range_var + " in [" + print(*a.lo) +
                   ", " + print(*a.hi) + "]";
    }
    return "all";
}

std::string guard_suffix(const SourcePattern& p) {
    if (!p.guard_ge) return "";
    return " for " + p.var + " >= " + std::to_string(*p.guard_ge);
}

// An expression that continues a whitespace-separated list must not begin with
// '-' (the parser would read it as subtraction), so parenthesize those.
std::string print_cont(const Expr& e) {
    std::string s = print(e);
    if (!s.empty() && s[0] == '-') return "(" + s + ")";
    return s;
}

}  // namespace

std::string print_spec(const MapSpec& spec) {
    std::ostringstream out;
    std::string space_hi = g12(spec.space.hi.value());
    if (!space_hi.empty() && space_hi[0] == '-') space_hi = "(" + space_hi + ")";
    out << "space " << g12(spec.space.lo.value()) << " " << space_hi << "\n";
    for (const auto& [name, e] : spec.const_decls)
        out << "const " << name << " = " << print(*e) << "\n";
    for (const auto& s : spec.isets)
        out << "iset " << s.name << " = " << print(*s.generator) << " for " << s.var << " >= "
            << s.k_start << "\n";
    for (const auto& f : spec.families) {
        out << "family " << f.name << " index "
            << (f.range == IndexRange::Naturals
                    ? "naturals"
                    : f.range == IndexRange::Integers ? "integers" : "singleton")
            << " endpoints " << print(*f.lo) << " " << print_cont(*f.hi);
        if (!f.accumulates.empty()) {
            out << " accumulates";
            for (size_t k = 0; k < f.accumulates.size(); ++k)
                out << " " << (k ? print_cont(*f.accumulates[k]) : print(*f.accumulates[k]));
        }
        switch (f.orient) {
            case Orient::Up: out << " orient up"; break;
            case Orient::Down: out << " orient down"; break;
            case Orient::EvenUp: out << " orient even_up"; break;
            case Orient::EvenDown: out << " orient even_down"; break;
            case Orient::Unspecified: break;
        }
        out << "\n";
    }
    if (!spec.order.empty()) {
        out << "order";
        for (const auto& item : spec.order) {
            out << " ";
            if (item.grouped) {
                out << "(";
                for (size_t i = 0; i < item.families.size(); ++i)
                    out << (i ? " " : "") << item.families[i];
                out << ")" << (item.ascending ? "+" : "-");
            } else {
                int f = spec.family_index(item.families[0]);
                bool indexed = f >= 0 && spec.family(f).range != IndexRange::Singleton;
                out << item.families[0];
                if (indexed) out << (item.ascending ? "+" : "-");
            }
        }
        out << "\n";
    }
    for (const auto& t : spec.transitions) {
        out << "transition " << print_pattern(t.src) << guard_suffix(t.src) << " ->";
        for (size_t i = 0; i < t.targets.size(); ++i)
            out << (i ? " | " : " ") << print_atom(t.targets[i]);
        out << "\n";
    }
    for (const auto& b : spec.branches) {
        out << "branch " << print_pattern(b.src);
        if (b.set_guard == BranchDecl::SetGuard::In) out << " in " << b.iset;
        if (b.set_guard == BranchDecl::SetGuard::NotIn) out << " notin " << b.iset;
        out << guard_suffix(b.src);
        out << " pieces " << b.slopes.size() << " slopes ";
        for (size_t i = 0; i < b.slopes.size(); ++i) out << (i ? ", " : "") << print(*b.slopes[i]);
        out << " targets ";
        for (size_t i = 0; i < b.piece_targets.size(); ++i)
            out << (i ? " ; " : "") << print_atom(b.piece_targets[i]);
        out << "\n";
    }
    out << "continuity " << (spec.piecewise ? "piecewise" : "global") << "\n";
    for (const auto& e : spec.fixed_exprs) out << "fixed " << print(*e) << "\n";
    return out.str();
}

}  // namespace cpmm
