#include <doctest.h>

#include <cmath>

#include "cpmm/expr.hpp"

using namespace cpmm;

namespace {
double ev(const std::string& s, double i = 0) {
    static std::map<std::string, double> consts = {{"lam", 3.0}, {"c", 0.5}};
    EvalContext ctx{&consts, "i", i};
    return eval(*parse_expression(s), ctx);
}
}  // namespace

TEST_CASE("arithmetic and precedence") {
    CHECK(ev("1+2*3") == 7);
    CHECK(ev("(1+2)*3") == 9);
    CHECK(ev("2^3^2") == 512);  // right associative
    CHECK(ev("-2^2") == -4);    // pow binds tighter than unary minus
    CHECK(ev("2^(-i)", 3) == doctest::Approx(0.125));
    CHECK(ev("lam^(-i-1)", 1) == doctest::Approx(1.0 / 9));
    CHECK(ev("(-1)^i", 5) == -1);
    CHECK(ev("(-1)^i", 8) == 1);
}

TEST_CASE("canonical print round trips") {
    for (const char* s : {"1-(2*(1-lam^(-i))+3*lam^(-i))/c", "i/2+((-1)^i-1)*(1-2*c)/4",
                          "2^(i+1)+2*i", "-2*2^i/(2*2^i+1)", "lam^2*(lam^2+1)",
                          "d*lam/((lam-1)*s)", "2+k*(k-1)/2"}) {
        ExprPtr e = parse_expression(s);
        CHECK(print(*e) == s);
        ExprPtr e2 = parse_expression(print(*e));
        CHECK(print(*e2) == s);
    }
}

TEST_CASE("affine index extraction") {
    std::map<std::string, double> consts;
    auto aff = [&](const char* s, const char* var) {
        return try_affine(*parse_expression(s), var, consts);
    };
    auto a = aff("2*k-2", "k");
    REQUIRE(a.has_value());
    CHECK(a->coef == 2);
    CHECK(a->offset == -2);
    auto b = aff("i+1", "i");
    REQUIRE(b.has_value());
    CHECK(b->coef == 1);
    CHECK(b->offset == 1);
    auto c = aff("0", "i");
    REQUIRE(c.has_value());
    CHECK(c->coef == 0);
    CHECK(!aff("k*k", "k").has_value());
    auto d = aff("(4*k+2)/2", "k");
    REQUIRE(d.has_value());
    CHECK(d->coef == 2);
    CHECK(d->offset == 1);
}

TEST_CASE("errors carry positions") {
    CHECK_THROWS_AS(parse_expression("1+"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("(1+2"), SyntaxError);
    CHECK_THROWS_AS(ev("unknown_name"), DomainError);
    CHECK_THROWS_AS(ev("1/0"), DomainError);
}
