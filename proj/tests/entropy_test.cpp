#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "cpmm/entropy.hpp"
#include "cpmm/gallery.hpp"
#include "cpmm/roots.hpp"

using namespace cpmm;

namespace {

TransitionRuleSet rules_for(const std::string& key) {
    return compile_transitions(gallery::load(key));
}

// independent oracle: brute-force DFS path enumeration on the truncated graph
long long brute_loops(const TransitionRuleSet& T, const BasicId& u, int length) {
    std::vector<BasicId> window = T.loop_window(u, length);
    std::function<long long(const BasicId&, int)> walk = [&](const BasicId& at, int left) {
        if (left == 0) return static_cast<long long>(at == u ? 1 : 0);
        long long total = 0;
        for (const auto& next : window)
            if (T.entry(at, next)) total += walk(next, left - 1);
        return total;
    };
    return walk(u, length);
}

const char* kTwoShiftDoc = R"(space 0 1
family E index singleton endpoints 0 1/2 orient up
family F index singleton endpoints 1/2 1 orient down
order E F
transition E -> E | F
transition F -> E | F
continuity global
)";

}  // namespace

TEST_CASE("big integers add, multiply, compare and print") {
    BigUint a(0xffffffffULL), b(1);
    CHECK((a + b).str() == "4294967296");
    BigUint big(1);
    for (int i = 0; i < 5; ++i) big = big * BigUint(1000000007ULL);
    CHECK(big.str() == "1000000035000000490000003430000012005000016807");
    CHECK(BigUint(123).to_double() == 123.0);
    CHECK(BigUint(7) < BigUint(8));
    CHECK(BigUint(0).zero());
}

TEST_CASE("loop counts at the full-image interval") {
    auto T = rules_for("s8-interval");
    BasicId D = parse_id(T.spec(), "D");
    LoopCounts lc = count_loops(T, D, 6);
    CHECK(lc.p[1] == BigUint(1));  // the self-loop
    // exact agreement with brute-force enumeration
    for (int n = 1; n <= 5; ++n) {
        CAPTURE(n);
        CHECK(lc.p[static_cast<size_t>(n)] ==
              BigUint(static_cast<std::uint64_t>(brute_loops(T, D, n))));
    }
    LoopCounts empty = count_loops(T, D, 0);
    CHECK(empty.p.size() == 1);
}

TEST_CASE("loop counts are supermultiplicative") {
    auto T = rules_for("s8-interval");
    LoopCounts lc = count_loops(T, parse_id(T.spec(), "D"), 12);
    for (int m = 1; m <= 6; ++m)
        for (int n = 1; n + m <= 12; ++n) {
            CAPTURE(m);
            CAPTURE(n);
            CHECK(lc.p[size_t(m)] * lc.p[size_t(n)] <= lc.p[size_t(m + n)]);
        }
}

TEST_CASE("first returns equal the population model exactly") {
    auto T = rules_for("s8-interval");
    FirstReturnSeries fr = first_returns(T, parse_id(T.spec(), "D"), 18);
    RabbitModel rm = rabbit_counts(18);
    CHECK(fr.f[1] == BigUint(1));  // the path D D
    for (int n = 1; n <= 18; ++n) {
        CAPTURE(n);
        CHECK(fr.f[size_t(n)] == rm.f[size_t(n)]);
    }
}

TEST_CASE("renewal identity holds exactly") {
    auto T = rules_for("s8-interval");
    BasicId D = parse_id(T.spec(), "D");
    LoopCounts lc = count_loops(T, D, 15);
    FirstReturnSeries fr = first_returns(T, D, 15);
    for (int n = 1; n <= 15; ++n) {
        BigUint sum;
        for (int k = 1; k <= n; ++k) sum += fr.f[size_t(k)] * lc.p[size_t(n - k)];
        CAPTURE(n);
        CHECK(sum == lc.p[size_t(n)]);
        CHECK(fr.f[size_t(n)] <= lc.p[size_t(n)]);
    }
}

TEST_CASE("population model values") {
    RabbitModel rm = rabbit_counts(30);
    CHECK(rm.w[4] == BigUint(4));
    CHECK(rm.f[3] == BigUint(3));
    double ratio = rm.w[30].to_double() / rm.w[29].to_double();
    CHECK(std::fabs(ratio - growth_root()) < 1e-6);
}

TEST_CASE("growth estimates") {
    auto T = rules_for("s8-interval");
    FirstReturnSeries fr = first_returns(T, parse_id(T.spec(), "D"), 30);
    PhiEstimate phi = phi_estimate(fr);
    CHECK(std::fabs(phi.value - growth_root()) < 0.02);

    FirstReturnSeries constant;
    constant.f.assign(31, BigUint(1));
    constant.f[0] = BigUint(0);
    CHECK(phi_estimate(constant).value == doctest::Approx(1.0));

    FirstReturnSeries doubling;
    doubling.f.resize(31);
    for (size_t n = 1; n <= 30; ++n) {
        BigUint v(1);
        for (size_t i = 0; i < n; ++i) v = v * BigUint(2);
        doubling.f[n] = v;
    }
    CHECK(phi_estimate(doubling).value == doctest::Approx(2.0));

    FirstReturnSeries short_series;
    short_series.f.assign(5, BigUint(1));
    CHECK_THROWS_AS(phi_estimate(short_series), InsufficientData);
}

TEST_CASE("strong positive recurrence of the interval example") {
    auto T = rules_for("s8-interval");
    FirstReturnSeries fr = first_returns(T, parse_id(T.spec(), "D"), 40);
    PhiEstimate phi = phi_estimate(fr);
    VereJonesClass vj = spr_test(fr, phi.value);
    CHECK(vj.verdict == VereJones::StronglyPositiveRecurrent);
    REQUIRE(vj.crossing_index.has_value());
    CHECK(*vj.crossing_index <= 8);
}

TEST_CASE("dyadic tower: transient evidence at the top interval") {
    auto T = rules_for("s10-none");
    BasicId top = parse_id(T.spec(), "I_0");
    FirstReturnSeries fr = first_returns(T, top, 200);
    // derived oracle: f(n+1) = 3^(n - pi(n)) with pi counting the sparse set
    const MapSpec& s = T.spec();
    const IsetDecl& N = s.isets.front();
    for (int n = 0; n <= 30; ++n) {
        BigUint expect(1);
        long long pw = n - N.count_leq(n, s.consts);
        for (long long i = 0; i < pw; ++i) expect = expect * BigUint(3);
        CAPTURE(n);
        CHECK(fr.f[size_t(n + 1)] == expect);
    }
    PhiEstimate phi = phi_estimate(fr);
    CHECK(phi.value == doctest::Approx(3.0));
    VereJonesClass vj = spr_test(fr, phi.value);
    CHECK(vj.verdict == VereJones::Transient);
    CHECK(vj.partial_sum == doctest::Approx(11.0 / 12).epsilon(1e-3));
}

TEST_CASE("recurrent boundary: a single self-loop") {
    FirstReturnSeries fr;
    fr.f.assign(21, BigUint(0));
    fr.f[1] = BigUint(1);
    VereJonesClass vj = spr_test(fr, 1.0);
    CHECK(vj.verdict == VereJones::RecurrentNotSpr);
    CHECK(vj.partial_sum == doctest::Approx(1.0));
    // and its Perron value from the generating function
    CHECK(perron_from_generating_function(fr, {0.5, 2.0}) == doctest::Approx(1.0));
}

TEST_CASE("generating-function root recovers the minimal slope") {
    auto T = rules_for("s8-interval");
    FirstReturnSeries fr = first_returns(T, parse_id(T.spec(), "D"), 60);
    double root = perron_from_generating_function(fr, {2.0, 3.0});
    CHECK(std::fabs(root - min_slope_root()) < 1e-3);
    // the defining gap of strong positive recurrence
    CHECK(phi_estimate(fr).value < root);
    CHECK_THROWS_AS(perron_from_generating_function(fr, {5.0, 6.0}), NoBracket);
}

TEST_CASE("full 2-shift fixtures have entropy log 2") {
    auto spec = std::make_shared<const MapSpec>(parse_spec(kTwoShiftDoc));
    auto T = compile_transitions(spec);
    FirstReturnSeries fr = first_returns(T, parse_id(*spec, "E"), 60);
    CHECK(fr.f[1] == BigUint(1));
    CHECK(fr.f[7] == BigUint(1));
    double root = perron_from_generating_function(fr, {1.5, 3.0});
    CHECK(std::fabs(root - 2.0) < 1e-10);
    CHECK(std::fabs(std::log(root) - std::log(2.0)) < 1e-10);

    // two self-loops collapsed onto one vertex: f = (2, 0, 0, ...)
    FirstReturnSeries two;
    two.f.assign(20, BigUint(0));
    two.f[1] = BigUint(2);
    CHECK(perron_from_generating_function(two, {1.5, 3.0}) == doctest::Approx(2.0));
}

TEST_CASE("unbounded drift is reported") {
    auto T = rules_for("s11-pcws");
    CHECK_THROWS_AS(count_loops(T, parse_id(T.spec(), "A_0"), 5), UnboundedDrift);
}

TEST_CASE("first-return tree levels carry exactly the first-return counts") {
    auto T = rules_for("s8-interval");
    FirstReturnSeries fr = first_returns(T, parse_id(T.spec(), "D"), 10);
    auto tree = first_return_tree(10);
    std::map<int, long long> per_level;
    for (const auto& node : tree) per_level[node.length] += 1;
    for (int n = 1; n <= 10; ++n) {
        CAPTURE(n);
        CHECK(BigUint(static_cast<std::uint64_t>(per_level[n])) == fr.f[size_t(n)]);
    }
    CHECK(tree.front().label == "D D");
}
