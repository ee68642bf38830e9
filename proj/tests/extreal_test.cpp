#include <doctest.h>

#include <vector>

#include "cpmm/extreal.hpp"

using namespace cpmm;

TEST_CASE("length of finite and infinite intervals") {
    CHECK(length(ExtInterval(ExtReal(0.0), ExtReal(1.0))).value() == 1.0);
    CHECK(length(ExtInterval(ExtReal::minus_infinity(), ExtReal(3.0))).is_pos_inf());
    // |[2^1+2*1-3, 2^2+2*1-2]| = |[1,4]| = 3 = 2^1+1
    CHECK(length(ExtInterval(ExtReal(1.0), ExtReal(4.0))).value() == 3.0);
}

TEST_CASE("lengths are nonnegative on a sampled lattice") {
    std::vector<double> pts = {-std::numeric_limits<double>::infinity(), -7.5, -1, 0, 0.25, 3,
                               std::numeric_limits<double>::infinity()};
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i; j < pts.size(); ++j) {
            ExtInterval iv{ExtReal(pts[i]), ExtReal(pts[j])};
            if (i == j && std::isinf(pts[i])) continue;  // degenerate at infinity
            CHECK(length(iv) >= ExtReal(0.0));
        }
}

TEST_CASE("ordering is a strict total order including both infinities") {
    std::vector<ExtReal> lattice = {ExtReal::minus_infinity(), ExtReal(-2.0), ExtReal(0.0),
                                    ExtReal(1e-9), ExtReal(5.0), ExtReal::infinity()};
    for (size_t i = 0; i < lattice.size(); ++i)
        for (size_t j = 0; j < lattice.size(); ++j) {
            CHECK(((lattice[i] < lattice[j]) == (i < j)));
            CHECK(((lattice[i] == lattice[j]) == (i == j)));
        }
}

TEST_CASE("affine application follows the sign rules") {
    CHECK(apply_affine(2, 1, ExtReal(3.0)).value() == 7.0);
    CHECK(apply_affine(-2, 0, ExtReal::infinity()).is_neg_inf());
    CHECK(apply_affine(0.5, 10, ExtReal::minus_infinity()).is_neg_inf());
    CHECK_THROWS_AS(apply_affine(0, 1, ExtReal::infinity()), IndeterminateForm);
}

TEST_CASE("affine round trip recovers finite inputs") {
    for (double s : {0.5, -3.0, 7.25}) {
        for (double c : {0.0, -1.5, 2.0}) {
            for (double x : {-4.0, 0.125, 9.75}) {
                double y = apply_affine(s, c, ExtReal(x)).value();
                double back = apply_affine(1.0 / s, -c / s, ExtReal(y)).value();
                CHECK(back == doctest::Approx(x).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("indeterminate forms raise instead of propagating") {
    CHECK_THROWS_AS(ExtReal::infinity() - ExtReal::infinity(), IndeterminateForm);
    CHECK_THROWS_AS(ExtReal::infinity() + ExtReal::minus_infinity(), IndeterminateForm);
    CHECK_THROWS_AS(ExtReal(0.0) * ExtReal::infinity(), IndeterminateForm);
}

TEST_CASE("iterating x-1 drifts to -inf") {
    ExtReal x(0.0);
    for (int i = 0; i < 100; ++i) x = apply_affine(1, -1, x);
    CHECK(x.value() == -100.0);
    CHECK(apply_affine(1, -1, ExtReal::minus_infinity()).is_neg_inf());
}

TEST_CASE("rendering uses inf and -inf") {
    CHECK(ExtReal::infinity().str() == "inf");
    CHECK(ExtReal::minus_infinity().str() == "-inf");
    CHECK(ExtReal(0.25).str() == "0.25");
}
