#include <doctest.h>

#include <cmath>

#include "cpmm/eigen.hpp"
#include "cpmm/gallery.hpp"
#include "cpmm/roots.hpp"

using namespace cpmm;

namespace {

TransitionRuleSet rules_for(const std::string& key) {
    return compile_transitions(gallery::load(key));
}

std::vector<BasicId> naturals_window(const MapSpec& s, long long imax) {
    std::vector<BasicId> w;
    for (int f = 0; f < static_cast<int>(s.families.size()); ++f) {
        if (s.family(f).range == IndexRange::Singleton) {
            w.push_back(BasicId{f, 0, -1});
        } else {
            for (long long i = 0; i <= imax; ++i) w.push_back(BasicId{f, i, -1});
        }
    }
    return w;
}

std::vector<BasicId> integers_window(const MapSpec& s, const char* fam, long long kmax) {
    std::vector<BasicId> w;
    int f = s.family_index(fam);
    for (long long k = -kmax; k <= kmax; ++k) w.push_back(BasicId{f, k, -1});
    return w;
}

const double kLamStar = 2 + std::sqrt(5.0);

}  // namespace

TEST_CASE("minimal-slope root bracket and residual") {
    double r = min_slope_root();
    CHECK(r > 2.65);
    CHECK(r < 2.67);
    double poly = ((r - 2) * r - 1) * r - 2;
    CHECK(std::fabs(poly) < 1e-10);
}

TEST_CASE("closed form at the minimal slope: alpha vanishes, entries summable") {
    double lam = min_slope_root();
    EigenOutcome out = solve_s8_closed_form(lam);
    REQUIRE(out.status == EigenOutcome::Status::ExistsUnique);
    CHECK(out.summability == Summability::Summable);
    auto s8 = gallery::load("s8-interval");
    int A = s8->family_index("A");
    // alpha = 0 at the root, so a_i collapses to (lam^2+1) lam^-i
    for (long long i : {0, 3, 10}) {
        double expect = (lam * lam + 1) * std::pow(lam, double(-i));
        CHECK(out.entries->value(BasicId{A, i, -1}) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("closed form entries satisfy the row system with tail sums") {
    auto T = rules_for("s8-interval");
    for (double lam : {min_slope_root(), 3.0, 4.0}) {
        CAPTURE(lam);
        EigenOutcome out = solve_s8_closed_form(lam);
        REQUIRE(out.exists());
        double r = residual_check(T, lam, *out.entries, naturals_window(T.spec(), 40));
        CHECK(r < 1e-9);
    }
}

TEST_CASE("closed form agrees with recurrence propagation (stable direction)") {
    // a_{i+2} + (lam+1) a_{i+1} - lam a_i + lam^-i (1+lam^-2) c_0 = 0, run downward:
    // the alternating characteristic root would amplify noise forward.
    double lam = 3.0;
    EigenOutcome out = solve_s8_closed_form(lam);
    auto s8 = gallery::load("s8-interval");
    int A = s8->family_index("A"), B = s8->family_index("B"), C = s8->family_index("C");
    double c0 = out.entries->value(BasicId{C, 0, -1});
    const size_t top = 40;
    std::vector<double> a(top + 1);
    a[top] = out.entries->value(BasicId{A, (long long)top, -1});
    a[top - 1] = out.entries->value(BasicId{A, (long long)(top - 1), -1});
    for (size_t i = top - 1; i-- > 0;)
        a[i] = (a[i + 2] + (lam + 1) * a[i + 1] +
                std::pow(lam, -double(i)) * (1 + 1 / (lam * lam)) * c0) /
               lam;
    for (size_t i = 0; i <= 25; ++i) {
        CAPTURE(i);
        double closed = out.entries->value(BasicId{A, (long long)i, -1});
        CHECK(std::fabs(closed - a[i]) < 1e-8 * std::max(1.0, std::fabs(closed)));
        // b_i = a_{i+1} + c_i/lam from the pairwise subtraction of rows
        double b_expect = a[i + 1] + std::pow(lam, -double(i + 1)) * c0;
        CHECK(out.entries->value(BasicId{B, (long long)i, -1}) ==
              doctest::Approx(b_expect).epsilon(1e-8));
    }
}

TEST_CASE("below the minimal slope the forced solution is negative") {
    EigenOutcome out = solve_s8_closed_form(2.0);
    CHECK(out.status == EigenOutcome::Status::None);
    CHECK(out.witness.find("< 0") != std::string::npos);
    CHECK_THROWS_AS(solve_s8_closed_form(1.0), DomainError);
}

TEST_CASE("positive-root side condition flips at the growth root") {
    double r = growth_root();
    for (double lam : {1.3, 1.6, r - 1e-3, r + 1e-3, 2.2, 3.0}) {
        double q = ((lam - 1) * lam - 1) * lam - 1;
        bool expect = q > 0;
        CHECK((recurrence_root_pos(lam) > 1 / lam) == expect);
    }
}

TEST_CASE("sawtooth step matrix has determinant one at every lambda") {
    for (double lam : {2.0, 3.0, kLamStar, 5.0, 10.0}) {
        CHECK(std::fabs(s9_step_matrix(lam).det() - 1.0) < 1e-14);
    }
}

TEST_CASE("sawtooth spectral trichotomy") {
    // rotation: lambda = 4, seed (1,1) turns negative by |k| <= 4
    EigenOutcome low = propagate_s9(4.0, {1.0, 1.0}, 4);
    CHECK(low.status == EigenOutcome::Status::None);
    CHECK(low.witness.find("< 0") != std::string::npos);

    // shear: unique solution (2, sqrt5-1) normalized at v_I_0 = 2
    EigenOutcome star = propagate_s9(kLamStar, {std::sqrt(5.0) - 1, 2.0}, 10);
    REQUIRE(star.status == EigenOutcome::Status::ExistsUnique);
    auto s9 = gallery::load("s9-extended");
    int I = s9->family_index("I");
    for (long long k = -6; k <= 6; ++k) {
        double expect = (k % 2 + 2) % 2 == 0 ? 2.0 : std::sqrt(5.0) - 1;
        CHECK(std::fabs(star.entries->value(BasicId{I, k, -1}) - expect) < 1e-12);
    }

    // hyperbolic: two-parameter family
    EigenOutcome fam = propagate_s9(6.0, {1.0, 2.0}, 30);
    CHECK(fam.status == EigenOutcome::Status::ExistsFamily);
    CHECK(fam.family_dim == 2);
}

TEST_CASE("hyperbolic sawtooth entries stay nonnegative and satisfy the rows") {
    auto T = rules_for("s9-extended");
    const MapSpec& s = T.spec();
    Mat2 M = s9_step_matrix(6.0);
    double t = M.a + M.d;
    double disc = std::sqrt(t * t - 4);
    std::pair<double, double> wplus{M.b, (t + disc) / 2 - M.a};
    std::pair<double, double> wminus{M.b, (t - disc) / 2 - M.a};

    // strictly between the eigendirections: divergent on both sides
    EigenOutcome mid = propagate_s9(
        6.0, {wplus.first + wminus.first, wplus.second + wminus.second}, 60);
    REQUIRE(mid.exists());
    for (long long k = -50; k <= 50; ++k)
        CHECK(mid.entries->value(BasicId{s.family_index("I"), k, -1}) >= 0);
    double r = residual_check(T, 6.0, *mid.entries, integers_window(s, "I", 50));
    CHECK(r < 1e-9);
    CHECK(mid.summability == Summability::BothDivergent);

    // on one eigendirection: divergent on one side only
    EigenOutcome plus = propagate_s9(6.0, wplus, 60);
    CHECK(plus.summability == Summability::RightDivergent);
    EigenOutcome minus = propagate_s9(6.0, wminus, 60);
    CHECK(minus.summability == Summability::LeftDivergent);

    // seeds outside the cone are rejected
    CHECK_THROWS_AS(propagate_s9(6.0, {1.0, 100.0}, 10), DomainError);
}

TEST_CASE("residuals of the shear solution are tiny") {
    auto T = rules_for("s9-extended");
    EigenOutcome star = propagate_s9(kLamStar, {std::sqrt(5.0) - 1, 2.0}, 60);
    double r = residual_check(T, kLamStar, *star.entries, integers_window(T.spec(), "I", 40));
    CHECK(r < 1e-12);
}

TEST_CASE("phase-space classification across the gallery outcomes") {
    // interval example at the minimal slope: finite interval, total lambda*d
    auto T8 = rules_for("s8-interval");
    double lam = min_slope_root();
    EigenOutcome s8 = solve_s8_closed_form(lam);
    auto spec8 = T8.spec_ptr();
    BasicId base{spec8->family_index("D"), 0, -1};
    PhaseSpaceClass c8 =
        classify_phase_space(T8, *s8.entries, base, 1e6, Window{0.0, 1.0, 24});
    CHECK(c8.verdict == PhaseVerdict::FiniteInterval);
    // classification is scale-free (basepoint entry scaled to 2), so the window
    // total is 2*lambda; the raw total of the entries is lambda*d
    CHECK(c8.left_sum + c8.right_sum == doctest::Approx(2 * lam).epsilon(1e-9));
    int A = spec8->family_index("A"), B = spec8->family_index("B"),
        C = spec8->family_index("C");
    double raw_total = s8.entries->tail_sum(A, 0, true) + s8.entries->tail_sum(B, 0, true) +
                       s8.entries->tail_sum(C, 0, true) + s8.entries->value(base);
    double lam_d = lam * lam * (lam * lam + 1);  // lambda * d at the minimal slope
    CHECK(raw_total == doctest::Approx(lam_d).epsilon(1e-9));

    // shear solution: constant entries over the whole line
    auto T9 = rules_for("s9-extended");
    EigenOutcome star = propagate_s9(kLamStar, {std::sqrt(5.0) - 1, 2.0}, 200);
    BasicId i0{T9.spec().family_index("I"), 0, -1};
    PhaseSpaceClass c9 = classify_phase_space(T9, *star.entries, i0, 50.0,
                                              Window{-60.0, 60.0, 130});
    CHECK(c9.verdict == PhaseVerdict::FullExtendedLine);

    // hyperbolic seeds: half line vs full line by seed choice
    Mat2 M = s9_step_matrix(6.0);
    double t = M.a + M.d, disc = std::sqrt(t * t - 4);
    EigenOutcome plus = propagate_s9(6.0, {M.b, (t + disc) / 2 - M.a}, 140);
    PhaseSpaceClass cp = classify_phase_space(T9, *plus.entries, i0, 1e3,
                                              Window{-60.0, 60.0, 130});
    CHECK(cp.verdict == PhaseVerdict::HalfLineRight);
    EigenOutcome minus = propagate_s9(6.0, {M.b, (t - disc) / 2 - M.a}, 140);
    PhaseSpaceClass cm = classify_phase_space(T9, *minus.entries, i0, 1e3,
                                              Window{-60.0, 60.0, 130});
    CHECK(cm.verdict == PhaseVerdict::HalfLineLeft);
    EigenOutcome both = propagate_s9(
        6.0, {2 * M.b, (t + disc) / 2 - M.a + (t - disc) / 2 - M.a}, 140);
    PhaseSpaceClass cb = classify_phase_space(T9, *both.entries, i0, 1e3,
                                              Window{-60.0, 60.0, 130});
    CHECK(cb.verdict == PhaseVerdict::FullExtendedLine);
}

TEST_CASE("dyadic tower has no nonnegative eigenvector at any slope") {
    for (double lam : {1.5, 2.0, 2.5}) {
        CAPTURE(lam);
        EigenOutcome out = nonexistence_s10(lam, 200, 1e6);
        CHECK(out.status == EigenOutcome::Status::None);
        CHECK(out.witness.find("diverges") != std::string::npos);
    }
    for (double lam : {3.0, 4.0, 8.0}) {
        CAPTURE(lam);
        EigenOutcome out = nonexistence_s10(lam, 200, 1e6);
        CHECK(out.status == EigenOutcome::Status::None);
        CHECK(out.witness.find("< 3") != std::string::npos);
    }
}

TEST_CASE("half-line map at slope 2") {
    EigenOutcome out = solve_s11();
    REQUIRE(out.exists());
    auto s11 = gallery::load("s11-pcws");
    int A = s11->family_index("A"), B = s11->family_index("B");
    CHECK(out.entries->value(BasicId{A, 3, -1}) == 9.0);
    CHECK(out.entries->value(BasicId{B, 7, -1}) == 1.0);
    CHECK(out.entries->value(BasicId{A, 0, -1}) == 2.0);
    auto T = rules_for("s11-pcws");
    double r = residual_check(T, 2.0, *out.entries, naturals_window(*s11, 30));
    CHECK(r < 1e-12);
    CHECK_THROWS_AS(solve_s11(3.0), DomainError);
}

TEST_CASE("reflected map at sqrt(2+sqrt5)") {
    double sl = std::sqrt(kLamStar);
    EigenOutcome out = solve_s12(sl);
    REQUIRE(out.exists());
    auto s12 = gallery::load("s12-nonmixing");
    int I = s12->family_index("I"), J = s12->family_index("J");
    CHECK(out.entries->value(BasicId{J, 0, -1}) == doctest::Approx(2.0 / sl).epsilon(1e-14));
    auto T = rules_for("s12-nonmixing");
    std::vector<BasicId> w;
    for (long long k = -40; k <= 40; ++k) {
        w.push_back(BasicId{I, k, -1});
        w.push_back(BasicId{J, k, -1});
    }
    CHECK(residual_check(T, sl, *out.entries, w) < 1e-12);
    // eliminating the reflected entries recovers the sawtooth system
    EigenOutcome star = propagate_s9(kLamStar, {std::sqrt(5.0) - 1, 2.0}, 50);
    for (long long k = -20; k <= 20; ++k) {
        double vi = out.entries->value(BasicId{I, k, -1});
        double vj = out.entries->value(BasicId{J, k, -1});
        CHECK(sl * vj == doctest::Approx(vi).epsilon(1e-14));
        CHECK(vi == doctest::Approx(
                        star.entries->value(BasicId{gallery::load("s9-extended")->family_index("I"),
                                                    k, -1}))
                        .epsilon(1e-12));
    }
    CHECK_THROWS_AS(solve_s12(2.0), DomainError);
}

TEST_CASE("truncation estimates converge upward to the minimal slope") {
    auto T = rules_for("s8-interval");
    PerronResult r = truncation_perron(T, {40, 100, 200, 300}, PerronOptions{10000, 1e-12, 1e-6});
    for (size_t i = 0; i + 1 < r.sweep.size(); ++i)
        CHECK(r.sweep[i].estimate <= r.sweep[i + 1].estimate + 1e-12);
    CHECK(std::fabs(r.sweep.back().estimate - min_slope_root()) < 1e-2);
    CHECK(!r.right_vector.empty());
    CHECK(!r.left_vector.empty());
}

TEST_CASE("one-interval truncation sees only the self-loop") {
    auto T = rules_for("s8-interval");
    PerronResult r = truncation_perron(T, {1});
    CHECK(r.sweep.back().estimate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.final_window.size() == 1);
}

TEST_CASE("truncation estimate for the sawtooth approaches 2+sqrt5") {
    auto T = rules_for("s9-extended");
    PerronResult r = truncation_perron(T, {301}, PerronOptions{200000, 1e-12, 1e-5});
    CHECK(std::fabs(r.sweep.back().estimate - kLamStar) < 5e-2);
}

TEST_CASE("divergent-row residuals are rejected") {
    auto T = rules_for("s8-interval");
    // constant entries make every ray row diverge
    struct Ones : EigenEntries {
        double value(const BasicId&) const override { return 1.0; }
        double tail_sum(int, long long, bool) const override {
            return std::numeric_limits<double>::infinity();
        }
    } ones;
    CHECK_THROWS_AS(residual_check(T, 3.0, ones, naturals_window(T.spec(), 5)), TailNotSummable);
}
