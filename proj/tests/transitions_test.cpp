#include <doctest.h>

#include "cpmm/gallery.hpp"
#include "cpmm/transitions.hpp"

using namespace cpmm;

namespace {
TransitionRuleSet rules_for(const std::string& key) {
    return compile_transitions(gallery::load(key));
}
BasicId id_of(const MapSpec& s, const char* text) { return parse_id(s, text); }
}  // namespace

TEST_CASE("interval example: row of the full-image interval and the 4x4 window") {
    auto T = rules_for("s8-interval");
    const MapSpec& s = T.spec();
    std::vector<BasicId> window = {id_of(s, "D"), id_of(s, "A_0"), id_of(s, "B_0"),
                                   id_of(s, "C_0")};
    FiniteMatrix m = T.truncate(window);
    // D maps over everything
    CHECK(m.entries[0] == std::vector<int>{1, 1, 1, 1});
    CHECK(m.entries[1] == std::vector<int>{0, 0, 0, 1});  // A_0 -> C_0 only in window
    CHECK(m.entries[2] == std::vector<int>{0, 0, 0, 1});  // B_0 -> C_0 only
    CHECK(m.entries[3] == std::vector<int>{1, 0, 0, 0});  // C_0 -> D
}

TEST_CASE("empty window truncates to a 0x0 matrix") {
    auto T = rules_for("s8-interval");
    FiniteMatrix m = T.truncate({});
    CHECK(m.labels.empty());
    CHECK(m.entries.empty());
}

TEST_CASE("sawtooth: banded 5x5 window matches the declared transitions") {
    auto T = rules_for("s9-extended");
    const MapSpec& s = T.spec();
    std::vector<BasicId> w;
    for (long long k = -2; k <= 2; ++k) w.push_back(BasicId{s.family_index("I"), k, -1});
    FiniteMatrix m = T.truncate(w);
    std::vector<std::vector<int>> expected = {
        {1, 1, 1, 0, 0},  // I_-2 -> I_{-4..0}
        {1, 1, 1, 0, 0},  // I_-1 -> I_{-2..0}
        {1, 1, 1, 1, 1},  // I_0  -> I_{-2..2}
        {0, 0, 1, 1, 1},  // I_1  -> I_{0..2}
        {0, 0, 1, 1, 1},  // I_2  -> I_{0..4}
    };
    CHECK(m.entries == expected);
    // the specific queries from the declared rules
    CHECK(T.entry(BasicId{s.family_index("I"), 4, -1}, BasicId{s.family_index("I"), 6, -1}));
    CHECK(!T.entry(BasicId{s.family_index("I"), 5, -1}, BasicId{s.family_index("I"), 3, -1}));
}

TEST_CASE("truncation windows are monotone: enlarging preserves entries") {
    auto T = rules_for("s9-extended");
    const MapSpec& s = T.spec();
    std::vector<BasicId> small, big;
    for (long long k = -2; k <= 2; ++k) small.push_back(BasicId{s.family_index("I"), k, -1});
    for (long long k = -4; k <= 4; ++k) big.push_back(BasicId{s.family_index("I"), k, -1});
    FiniteMatrix ms = T.truncate(small), mb = T.truncate(big);
    for (size_t r = 0; r < small.size(); ++r)
        for (size_t c = 0; c < small.size(); ++c)
            CHECK(ms.entries[r][c] == mb.entries[r + 2][c + 2]);
}

TEST_CASE("dyadic tower is refined into thirds with slope-matched pieces") {
    auto T = rules_for("s10-none");
    const MapSpec& s = T.spec();
    int I = s.family_index("I");
    CHECK(T.sub_count(I, 0) == 1);
    for (long long n = 1; n <= 9; ++n) CHECK(T.sub_count(I, n) == 3);

    // single-crossing levels (2 is in the set) keep sub-piece alignment
    CHECK(T.entry(id_of(s, "I_2^0"), id_of(s, "I_1^0")));
    CHECK(!T.entry(id_of(s, "I_2^0"), id_of(s, "I_1^1")));
    // triple-crossing levels hit every piece below
    CHECK(T.entry(id_of(s, "I_4^1"), id_of(s, "I_3^0")));
    CHECK(T.entry(id_of(s, "I_4^1"), id_of(s, "I_3^2")));
    // no self transition among refined pieces except via the top interval
    CHECK(!T.entry(id_of(s, "I_5^1"), id_of(s, "I_5^1")));
    CHECK(T.entry(id_of(s, "I_0"), id_of(s, "I_0")));
    CHECK(T.entry(id_of(s, "I_0"), id_of(s, "I_7^2")));

    // geometry: thirds of I_1 = [1/4, 1/2]
    ExtInterval p = T.interval(id_of(s, "I_1^1"));
    CHECK(p.lo.value() == doctest::Approx(1.0 / 4 + 1.0 / 12));
    CHECK(p.hi.value() == doctest::Approx(1.0 / 4 + 2.0 / 12));
}

TEST_CASE("drift bounds") {
    CHECK(rules_for("s9-extended").drift().symmetric == 2);
    auto d8 = rules_for("s8-interval").drift();
    CHECK(!d8.symmetric.has_value());  // rays jump arbitrarily far up
    REQUIRE(d8.descent.has_value());
    CHECK(*d8.descent <= 2);
    auto d10 = rules_for("s10-none").drift();
    REQUIRE(d10.descent.has_value());
    CHECK(*d10.descent == 1);
    auto d11 = rules_for("s11-pcws").drift();
    CHECK(!d11.descent.has_value());  // B_i drops to A_0 from arbitrarily high
    auto d12 = rules_for("s12-nonmixing").drift();
    CHECK(d12.symmetric == 2);
}

TEST_CASE("universe enumeration tiles a window and exposes accumulation gaps") {
    auto T = rules_for("s8-interval");
    Window w{0.0, 1.0, 12};
    auto segs = enumerate_universe(T, w);
    REQUIRE(!segs.empty());
    CHECK(segs.front().lo == doctest::Approx(0.0));
    CHECK(segs.back().hi == doctest::Approx(1.0));
    double cursor = 0;
    int gaps = 0;
    for (const auto& s : segs) {
        CHECK(s.lo == doctest::Approx(cursor).epsilon(1e-9));
        cursor = s.hi;
        if (s.kind == UniverseSegment::Kind::Gap) {
            ++gaps;
            CHECK(!s.tails.empty());
        }
    }
    CHECK(cursor == doctest::Approx(1.0));
    CHECK(gaps == 2);  // one on each side of the accumulation point
}

TEST_CASE("mixing heuristic verdicts across the gallery") {
    CHECK(mixing_heuristic(rules_for("s8-interval"), 60).verdict ==
          MixingReport::Verdict::LikelyMixing);
    CHECK(mixing_heuristic(rules_for("s9-extended"), 60).verdict ==
          MixingReport::Verdict::LikelyMixing);
    CHECK(mixing_heuristic(rules_for("s10-none"), 60).verdict ==
          MixingReport::Verdict::LikelyMixing);
    auto m12 = mixing_heuristic(rules_for("s12-nonmixing"), 60);
    CHECK(m12.verdict == MixingReport::Verdict::NotMixingWitness);
    CHECK(m12.period == 2);
    auto m2 = mixing_heuristic(rules_for("s2-toy"), 40);
    CHECK(m2.verdict == MixingReport::Verdict::NotMixingWitness);
    CHECK(!m2.period.has_value());
    CHECK(mixing_heuristic(rules_for("s11-pcws"), 40).verdict ==
          MixingReport::Verdict::Inconclusive);
}

namespace {
// geometric extent of a row span, accumulation-aware
std::pair<double, double> span_extent(const MapSpec& s, const TransitionRuleSet& T,
                                      const TargetSpan& span) {
    if (span.sub >= 0) {
        ExtInterval iv = T.interval(BasicId{span.family, span.lo, span.sub});
        return {iv.lo.value(), iv.hi.value()};
    }
    ExtInterval near = s.family_interval(span.family, span.lo);
    double lo = near.lo.value(), hi = near.hi.value();
    if (span.hi) {
        ExtInterval far = s.family_interval(span.family, *span.hi);
        lo = std::min(lo, far.lo.value());
        hi = std::max(hi, far.hi.value());
    } else {
        auto acc = s.accumulation(span.family, true);
        REQUIRE(acc.has_value());
        lo = std::min(lo, *acc);
        hi = std::max(hi, *acc);
    }
    return {lo, hi};
}
}  // namespace

TEST_CASE("markov consistency: sampled interior points land inside declared targets") {
    for (const std::string key : {"s8-interval", "s9-extended", "s10-none", "s11-pcws",
                                  "s12-nonmixing", "s2-toy"}) {
        CAPTURE(key);
        auto T = rules_for(key);
        const MapSpec& s = T.spec();
        for (int f = 0; f < static_cast<int>(s.families.size()); ++f) {
            long long lo = s.family(f).range == IndexRange::Integers ? -4 : 0;
            long long hi = s.family(f).range == IndexRange::Singleton ? 0 : 4;
            if (s.family(f).range == IndexRange::Singleton) lo = 0;
            for (long long i = lo; i <= hi; ++i) {
                for (const auto& id : T.pieces_of(f, i)) {
                    ExtInterval iv = T.interval(id);
                    for (double t : {0.21, 0.5, 0.83}) {
                        double x = iv.lo.value() + t * (iv.hi.value() - iv.lo.value());
                        double y = evaluate_map(s, ExtReal(x)).value();
                        bool inside = false;
                        for (const auto& span : T.row(id)) {
                            auto [slo, shi] = span_extent(s, T, span);
                            if (y >= slo - 1e-9 && y <= shi + 1e-9) inside = true;
                        }
                        CAPTURE(format_id(s, id));
                        CAPTURE(x);
                        CHECK(inside);
                    }
                }
            }
        }
    }
}
