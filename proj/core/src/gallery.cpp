#include "cpmm/gallery.hpp"

#include <map>
#include <mutex>

namespace cpmm::gallery {

namespace {

const char* kS8 = R"(# Interval gallery map: three interleaved families plus a full-image interval.
# Interval lengths realize the minimal-slope eigenvector, so every branch has
# the same absolute slope.
space 0 1
const lam = lambda_min
const scale = lam^2*(lam^2+1)
const d = lam*(lam^2+1)
const xstar = d*lam/((lam-1)*scale)
const absum = 2*lam^3/(lam-1)
family D index singleton endpoints 0 d/scale orient down
family C index naturals endpoints d*(lam-lam^(-i))/((lam-1)*scale) d*(lam-lam^(-i-1))/((lam-1)*scale) accumulates xstar orient up
family B index naturals endpoints 1-(absum*(1-lam^(-i))+2*lam^2*lam^(-i))/scale 1-(absum*(1-lam^(-i))+(lam^2+1)*lam^(-i))/scale accumulates xstar orient down
family A index naturals endpoints 1-(absum*(1-lam^(-i))+(lam^2+1)*lam^(-i))/scale 1-absum*(1-lam^(-i))/scale accumulates xstar orient up
order D C+ (B A)-
transition D -> all
transition C_0 -> D
transition C_i for i >= 1 -> C_(i-1)
transition A_i -> A_j for j >= i+1 | B_j for j >= i+1 | C_j for j >= i
transition B_i -> A_j for j >= i+2 | B_j for j >= i+2 | C_j for j >= i
continuity global
fixed xstar
)";

const char* kS9 = R"(# Sawtooth of constant slope 2+sqrt5 on the extended real line.
space -inf inf
const lam = 2+sqrt5
family I index integers endpoints i/2+((-1)^i-1)*(1-2*b)/4 (i+1)/2+((-1)^(i+1)-1)*(1-2*b)/4 accumulates -inf inf orient even_up
order I+
transition I_(2*k) -> I_j for j in [2*k-2, 2*k+2]
transition I_(2*k+1) -> I_j for j in [2*k, 2*k+2]
continuity global
fixed -inf
fixed inf
)";

const char* kS10 = R"(# Dyadic tower where selected levels cross once with slope 2 and the rest
# cross three times with slopes of modulus 6.
space 0 1
iset N = 2+k*(k-1)/2 for k >= 1
family I index naturals endpoints 2^(-i-1) 2^(-i) accumulates 0
order I-
transition I_0 -> all
transition I_i for i >= 1 -> I_(i-1)
branch I_0 pieces 1 slopes -2 targets all
branch I_i in N pieces 1 slopes 2 targets I_(i-1)
branch I_i notin N for i >= 1 pieces 3 slopes 6, -6, 6 targets I_(i-1) ; I_(i-1) ; I_(i-1)
continuity global
fixed 0
)";

const char* kS11 = R"(# Piecewise-continuous half-line map: two-piece climbs with a flat ramp onto
# the next block, slope-2 drops back to the first interval.
space 0 inf
family A index naturals endpoints 2^i+2*i-1 2^(i+1)+2*i accumulates inf
family B index naturals endpoints 2^(i+1)+2*i 2^(i+1)+2*i+1 accumulates inf orient up
order (A B)+
transition A_i -> B_i | A_(i+1)
transition B_i -> A_0
branch A_i pieces 2 slopes 2^(-i), 2^(i+1)+1 targets B_i ; A_(i+1)
continuity piecewise
fixed inf
)";

const char* kS11Partner = R"(# Constant-slope-2 companion of the piecewise-continuous half-line map.
space 0 inf
family A index naturals endpoints 2^i+2*i-1 2^(i+1)+2*i accumulates inf orient up
family B index naturals endpoints 2^(i+1)+2*i 2^(i+1)+2*i+1 accumulates inf orient up
order (A B)+
transition A_i -> B_i | A_(i+1)
transition B_i -> A_0
continuity piecewise
fixed inf
)";

const char* kS2 = R"(# Unit shift on the extended real line: constant slope 1, every orbit drifts
# to -inf.  Plot-only toy.
space -inf inf
family I index integers endpoints i i+1 accumulates -inf inf orient up
order I+
transition I_i -> I_(i-1)
continuity global
fixed -inf
fixed inf
)";

std::vector<Entry> build_entries();

}  // namespace

std::string make_nonmixing_document() {
    MapSpec s9 = parse_spec(kS9);

    MapSpec m;
    m.consts = builtin_constants();
    m.space = ExtInterval(ExtReal(-1.0), ExtReal(1.0));

    FamilySpec J;
    J.name = "J";
    J.range = IndexRange::Integers;
    J.lo = parse_expression("-2*2^i/(2*2^i+1)");
    J.hi = parse_expression("-2^i/(2^i+1)");
    J.accumulates = {parse_expression("0"), parse_expression("-1")};
    J.orient = Orient::Down;
    FamilySpec I;
    I.name = "I";
    I.range = IndexRange::Integers;
    I.lo = parse_expression("2^i/(2^i+1)");
    I.hi = parse_expression("2*2^i/(2*2^i+1)");
    I.accumulates = {parse_expression("0"), parse_expression("1")};
    I.orient = Orient::EvenDown;
    m.families = {J, I};

    m.order.push_back(OrderItem{{"J"}, false, false});
    m.order.push_back(OrderItem{{"I"}, true, false});

    // the rules of the source map, reflected
    for (TransitionDecl t : s9.transitions) {
        for (auto& a : t.targets) a.family = "J";
        m.transitions.push_back(std::move(t));
    }
    TransitionDecl back;
    back.src.family = "J";
    back.src.kind = SourcePattern::Kind::Var;
    back.src.var = "k";
    TargetAtom ta;
    ta.family = "I";
    ta.kind = TargetAtom::Kind::Single;
    ta.single = Expr::make_name("k");
    back.targets.push_back(ta);
    m.transitions.push_back(std::move(back));

    m.piecewise = false;
    m.fixed_exprs.push_back(parse_expression("0"));
    m.fixed_points.push_back(0.0);

    std::string doc = "# Reflected compactification of the extended-line sawtooth: transitive but\n"
                      "# not mixing (the two halves swap on every step).\n" +
                      print_spec(m);
    return doc;
}

namespace {

const std::string& kS12Doc() {
    static const std::string doc = make_nonmixing_document();
    return doc;
}

std::vector<Entry> build_entries() {
    std::vector<Entry> v;
    v.push_back(Entry{"s8-interval", "interval map with interleaved families", kS8,
                      "likely-mixing", "constant-slope model on a finite interval"});
    v.push_back(Entry{"s9-extended", "constant-slope sawtooth on the extended line", kS9,
                      "likely-mixing", "conjugate models on half-lines or the full extended line"});
    v.push_back(Entry{"s10-none", "dyadic tower with no nonnegative eigenvector", kS10,
                      "likely-mixing", "obstructed: no eigenvector at any slope"});
    v.push_back(Entry{"s11-pcws", "piecewise-continuous half-line map", kS11, "inconclusive",
                      "obstructed: conjugacy would break continuity"});
    v.push_back(Entry{"s12-nonmixing", "transitive but non-mixing reflection", kS12Doc(),
                      "not-mixing period 2", "obstructed: infinite image length near the center"});
    v.push_back(Entry{"s2-toy", "unit shift on the extended line", kS2, "not-mixing no-loops",
                      "plot-only toy"});
    return v;
}

}  // namespace

const std::vector<Entry>& entries() {
    static const std::vector<Entry> v = build_entries();
    return v;
}

const Entry* find(const std::string& key) {
    for (const auto& e : entries())
        if (e.key == key) return &e;
    return nullptr;
}

std::shared_ptr<const MapSpec> load(const std::string& key) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const MapSpec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Entry* e = find(key);
    if (!e) throw DomainError("unknown gallery key '" + key + "'");
    auto spec = std::make_shared<const MapSpec>(parse_spec(e->doc));
    cache[key] = spec;
    return spec;
}

std::shared_ptr<const MapSpec> s11_partner() {
    static const auto spec = std::make_shared<const MapSpec>(parse_spec(kS11Partner));
    return spec;
}

}  // namespace cpmm::gallery
