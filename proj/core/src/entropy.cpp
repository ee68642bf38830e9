#include "cpmm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "cpmm/roots.hpp"

namespace cpmm {

BigUint::BigUint(std::uint64_t v) {
    while (v) {
        limbs_.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        v >>= 32;
    }
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint& BigUint::operator+=(const BigUint& o) {
    std::uint64_t carry = 0;
    size_t n = std::max(limbs_.size(), o.limbs_.size());
    limbs_.resize(n, 0);
    for (size_t i = 0; i < n; ++i) {
        std::uint64_t s = carry + limbs_[i] + (i < o.limbs_.size() ? o.limbs_[i] : 0);
        limbs_[i] = static_cast<std::uint32_t>(s & 0xffffffffu);
        carry = s >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
    return *this;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
    BigUint out;
    if (a.limbs_.empty() || b.limbs_.empty()) return out;
    out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (size_t j = 0; j < b.limbs_.size(); ++j) {
            std::uint64_t cur = out.limbs_[i + j] +
                                static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
            out.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        size_t k = i + b.limbs_.size();
        while (carry) {
            std::uint64_t cur = out.limbs_[k] + carry;
            out.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            ++k;
        }
    }
    out.trim();
    return out;
}

bool operator<(const BigUint& a, const BigUint& b) {
    if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size();
    for (size_t i = a.limbs_.size(); i-- > 0;)
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
    return false;
}

double BigUint::to_double() const {
    double v = 0;
    for (size_t i = limbs_.size(); i-- > 0;) v = v * 4294967296.0 + limbs_[i];
    return v;
}

std::string BigUint::str() const {
    if (limbs_.empty()) return "0";
    std::vector<std::uint32_t> work(limbs_);
    std::string digits;
    while (!work.empty()) {
        std::uint64_t rem = 0;
        for (size_t i = work.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | work[i];
            work[i] = static_cast<std::uint32_t>(cur / 10);
            rem = cur % 10;
        }
        digits.push_back(static_cast<char>('0' + rem));
        while (!work.empty() && work.back() == 0) work.pop_back();
    }
    return std::string(digits.rbegin(), digits.rend());
}

// ---------------------------------------------------------------------------

namespace {

struct WindowGraph {
    std::vector<BasicId> ids;
    std::map<BasicId, int> pos;
    std::vector<std::vector<int>> succ;  // succ[r] = columns c with T(r,c)=1
};

WindowGraph build_graph(const TransitionRuleSet& rules, const std::vector<BasicId>& window) {
    WindowGraph g;
    g.ids = window;
    for (size_t i = 0; i < window.size(); ++i) g.pos[window[i]] = static_cast<int>(i);
    g.succ.resize(window.size());
    for (size_t r = 0; r < window.size(); ++r) {
        for (const TargetSpan& span : rules.row(window[r])) {
            if (span.sub >= 0) {
                auto it = g.pos.find(BasicId{span.family, span.lo, span.sub});
                if (it != g.pos.end()) g.succ[r].push_back(it->second);
                continue;
            }
            // clip the span against the window's index range for that family
            long long max_idx = std::numeric_limits<long long>::min();
            long long min_idx = std::numeric_limits<long long>::max();
            for (const auto& id : window)
                if (id.family == span.family) {
                    max_idx = std::max(max_idx, id.index);
                    min_idx = std::min(min_idx, id.index);
                }
            if (max_idx < min_idx) continue;
            long long lo = std::max(span.lo, min_idx);
            long long hi = std::min(span.hi.value_or(max_idx), max_idx);
            for (long long j = lo; j <= hi; ++j) {
                for (const auto& jid : rules.pieces_of(span.family, j)) {
                    auto it = g.pos.find(jid);
                    if (it != g.pos.end()) g.succ[r].push_back(it->second);
                }
            }
        }
        std::sort(g.succ[r].begin(), g.succ[r].end());
        g.succ[r].erase(std::unique(g.succ[r].begin(), g.succ[r].end()), g.succ[r].end());
    }
    return g;
}

}  // namespace

LoopCounts count_loops(const TransitionRuleSet& rules, const BasicId& u, int n_max) {
    LoopCounts out;
    out.vertex = u;
    out.p.resize(static_cast<size_t>(n_max) + 1);
    out.p[0] = BigUint(1);
    if (n_max == 0) return out;

    WindowGraph g = build_graph(rules, rules.loop_window(u, n_max));
    int upos = g.pos.at(u);
    // w = T^n e_u, entry at r counts paths r -> u of length n
    std::vector<BigUint> w(g.ids.size());
    w[static_cast<size_t>(upos)] = BigUint(1);
    for (int n = 1; n <= n_max; ++n) {
        std::vector<BigUint> next(g.ids.size());
        for (size_t r = 0; r < g.ids.size(); ++r) {
            BigUint s;
            for (int c : g.succ[r]) s += w[static_cast<size_t>(c)];
            next[r] = std::move(s);
        }
        w = std::move(next);
        out.p[static_cast<size_t>(n)] = w[static_cast<size_t>(upos)];
    }
    return out;
}

FirstReturnSeries first_returns(const TransitionRuleSet& rules, const BasicId& u, int n_max) {
    FirstReturnSeries out;
    out.vertex = u;
    out.f.resize(static_cast<size_t>(n_max) + 1);
    if (n_max == 0) return out;

    WindowGraph g = build_graph(rules, rules.loop_window(u, n_max));
    size_t n_ids = g.ids.size();
    int upos = g.pos.at(u);

    // paths w -> u of length n that avoid u internally
    std::vector<BigUint> cur(n_ids), prev(n_ids);
    for (size_t r = 0; r < n_ids; ++r)
        for (int c : g.succ[r])
            if (c == upos) prev[r] = BigUint(1);
    // f(1): a direct self-loop
    out.f[1] = prev[static_cast<size_t>(upos)];
    for (int n = 2; n <= n_max; ++n) {
        for (size_t r = 0; r < n_ids; ++r) {
            BigUint s;
            for (int c : g.succ[r])
                if (c != upos) s += prev[static_cast<size_t>(c)];
            cur[r] = std::move(s);
        }
        out.f[static_cast<size_t>(n)] = cur[static_cast<size_t>(upos)];
        std::swap(cur, prev);
    }
    return out;
}

int FirstReturnSeries::nonzero_terms() const {
    int k = 0;
    for (const auto& v : f)
        if (!v.zero()) ++k;
    return k;
}

RabbitModel rabbit_counts(int n_max) {
    if (n_max < 3) throw DomainError("the population model needs n_max >= 3");
    RabbitModel m;
    m.w.resize(static_cast<size_t>(n_max) + 1);
    m.f.resize(static_cast<size_t>(n_max) + 1);
    m.w[1] = BigUint(1);
    m.w[2] = BigUint(1);
    m.w[3] = BigUint(2);
    for (int n = 4; n <= n_max; ++n)
        m.w[static_cast<size_t>(n)] =
            m.w[static_cast<size_t>(n - 1)] + m.w[static_cast<size_t>(n - 2)] +
            m.w[static_cast<size_t>(n - 3)];
    for (int n = 1; n <= n_max; ++n) {
        m.f[static_cast<size_t>(n)] = m.w[static_cast<size_t>(n)];
        if (n >= 3) m.f[static_cast<size_t>(n)] += m.w[static_cast<size_t>(n - 2)];
    }
    return m;
}

// ---------------------------------------------------------------------------

PhiEstimate phi_estimate(const FirstReturnSeries& series) {
    if (series.nonzero_terms() < 10)
        throw InsufficientData("growth estimation needs at least 10 nonzero first-return counts");
    std::vector<double> ratios;
    for (size_t n = 1; n + 1 < series.f.size(); ++n) {
        if (series.f[n].zero() || series.f[n + 1].zero()) continue;
        ratios.push_back(series.f[n + 1].to_double() / series.f[n].to_double());
    }
    size_t tail = std::max<size_t>(5, ratios.size() / 3);
    tail = std::min(tail, ratios.size());
    PhiEstimate est;
    est.spread_lo = std::numeric_limits<double>::infinity();
    est.spread_hi = 0;
    for (size_t i = ratios.size() - tail; i < ratios.size(); ++i) {
        est.spread_lo = std::min(est.spread_lo, ratios[i]);
        est.spread_hi = std::max(est.spread_hi, ratios[i]);
    }
    est.value = est.spread_hi;  // limsup-style proxy
    size_t last = series.f.size() - 1;
    while (last > 0 && series.f[last].zero()) --last;
    est.root_estimate = std::exp(std::log(series.f[last].to_double()) / double(last));
    return est;
}

const char* to_string(VereJones v) {
    switch (v) {
        case VereJones::StronglyPositiveRecurrent: return "strongly_positive_recurrent";
        case VereJones::RecurrentNotSpr: return "recurrent_not_spr";
        case VereJones::Transient: return "transient";
        case VereJones::Inconclusive: return "inconclusive";
    }
    return "?";
}

VereJonesClass spr_test(const FirstReturnSeries& series, double phi) {
    if (!(phi > 0)) throw DomainError("phi must be positive");
    VereJonesClass out;
    double sum = 0, max_term = 0, last_term = 0;
    double half_sum = 0;
    size_t n_terms = series.f.size() - 1;
    for (size_t n = 1; n < series.f.size(); ++n) {
        double t = series.f[n].zero()
                       ? 0.0
                       : std::exp(std::log(series.f[n].to_double()) - double(n) * std::log(phi));
        sum += t;
        max_term = std::max(max_term, t);
        last_term = t;
        if (n == n_terms / 2) half_sum = sum;
        if (!out.crossing_index && sum > 1.0) {
            out.crossing_index = static_cast<int>(n);
            out.verdict = VereJones::StronglyPositiveRecurrent;
            out.partial_sum = sum;
            out.evidence = "partial sums of f(n) phi^-n cross 1 at n = " + std::to_string(n);
            return out;
        }
    }
    out.partial_sum = sum;
    bool decayed = max_term > 0 && last_term < 1e-6 * std::max(1.0, max_term);
    bool plateaued = sum - half_sum < 5e-3 * std::max(1.0, sum);
    if (std::fabs(sum - 1.0) <= 1e-9) {
        out.verdict = VereJones::RecurrentNotSpr;
        out.evidence = "partial sums reach exactly 1: recurrent boundary case";
    } else if (decayed && plateaued && sum < 1.0 - 0.02) {
        out.verdict = VereJones::Transient;
        out.evidence = "partial sums plateau at " + ExtReal(sum).str() +
                       " < 1 with decayed terms (heuristic tail, not certified)";
    } else {
        out.verdict = VereJones::Inconclusive;
        out.evidence = "partial sums neither cross 1 nor certifiably plateau below it";
    }
    return out;
}

double perron_from_generating_function(const FirstReturnSeries& series,
                                       std::pair<double, double> bracket) {
    auto G = [&](double lam) {
        double s = 0;
        for (size_t n = 1; n < series.f.size(); ++n)
            if (!series.f[n].zero())
                s += std::exp(std::log(series.f[n].to_double()) - double(n) * std::log(lam));
        return s - 1.0;
    };
    if (!(G(bracket.first) > 0 && G(bracket.second) < 0))
        throw NoBracket("generating-function values do not straddle 1 on the bracket");
    return bisect(G, bracket.first, bracket.second, 1e-12);
}

// ---------------------------------------------------------------------------

std::vector<ReturnTreeNode> first_return_tree(int max_length) {
    struct Item {
        std::string x;       // the A/B prefix, as text
        bool ends_b = false; // whether x ends with B_n for the current n
        int n = -1;          // depth of the descending chain
        int length = 1;
        int index = 0;       // position in the output vector
    };
    auto label_of = [](const Item& it) {
        std::string s = "D";
        if (!it.x.empty()) s += " " + it.x;
        for (int c = it.n; c >= 0; --c) s += " C_" + std::to_string(c);
        return s + " D";
    };

    std::vector<ReturnTreeNode> out;
    std::deque<Item> queue;
    Item root;
    out.push_back(ReturnTreeNode{label_of(root), root.length, -1});
    queue.push_back(root);
    while (!queue.empty()) {
        Item it = queue.front();
        queue.pop_front();
        // one-step descendant: extend the chain
        std::vector<std::pair<Item, int>> kids;
        Item c1 = it;
        c1.n += 1;
        c1.ends_b = false;  // the flag refers to B_n at the new chain depth
        c1.length += 1;
        // x unchanged: ends_b true only if x ends with B at exactly the new n
        if (!it.x.empty() && it.ends_b) {
            // previous label ended with B_n; after deepening it no longer matches
            c1.ends_b = false;
        }
        kids.emplace_back(c1, 1);
        if (!it.ends_b) {
            Item c2 = it;
            c2.n += 1;
            c2.x += (c2.x.empty() ? "" : " ") + std::string("A_") + std::to_string(c2.n);
            c2.ends_b = false;
            c2.length += 2;
            kids.emplace_back(c2, 2);
            Item c3 = it;
            c3.n += 1;
            c3.x += (c3.x.empty() ? "" : " ") + std::string("B_") + std::to_string(c3.n);
            c3.ends_b = true;
            c3.length += 2;
            kids.emplace_back(c3, 2);
        }
        for (auto& [kid, step] : kids) {
            if (kid.length > max_length) continue;
            kid.index = static_cast<int>(out.size());
            out.push_back(ReturnTreeNode{label_of(kid), kid.length, it.index});
            queue.push_back(kid);
        }
    }
    return out;
}

}  // namespace cpmm
