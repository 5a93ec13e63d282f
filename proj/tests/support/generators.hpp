#pragma once

// Seeded random instances for the property suites and the acceptance run.

#include "tbreach/model.hpp"
#include "tbreach/semantics.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline tbreach::Rational rational(Rng& rng, std::int64_t max_num, std::int64_t max_den)
{
    tbreach::Rational r(static_cast<long>(pick(rng, 0, max_num)), static_cast<long>(pick(rng, 1, max_den)));
    r.canonicalize();
    return r;
}

// One-sided, equality or bounded atom with constants in [0, cmax].
inline tbreach::Atom rect_atom(Rng& rng, std::size_t x, std::int64_t cmax, bool allow_strict = true)
{
    using tbreach::Bound;
    using tbreach::Interval;
    const std::int64_t a = pick(rng, 0, cmax);
    const std::int64_t b = pick(rng, a, cmax);
    const bool sa = allow_strict && coin(rng, 0.3);
    const bool sb = allow_strict && coin(rng, 0.3);
    switch (pick(rng, 0, 3)) {
    case 0: return tbreach::Atom::rect(x, Interval::point(a));
    case 1: return tbreach::Atom::rect(x, Interval::at_most(b, !sb));
    case 2: return tbreach::Atom::rect(x, Interval::at_least(a, !sa));
    default: break;
    }
    if (a == b)
        return tbreach::Atom::rect(x, Interval::point(a));
    return tbreach::Atom::rect(x, Interval::make(Bound::finite(a), !sa, Bound::finite(b), !sb));
}

struct RhaShape {
    std::size_t max_locations = 3;
    std::size_t max_vars = 2;
    std::size_t max_edges = 5;
    std::int64_t cmax = 2;
    bool strict_atoms = true;
    bool interval_rates = true;
    bool nondeterministic_resets = true;
};

// Rectangular, non-negative rates, diagonal-free.
inline tbreach::Automaton random_rha(Rng& rng, const RhaShape& shape = {})
{
    using tbreach::Interval;
    tbreach::Automaton h;
    h.name = "random";
    const std::size_t n = static_cast<std::size_t>(pick(rng, 1, static_cast<std::int64_t>(shape.max_vars)));
    for (std::size_t x = 0; x < n; ++x)
        h.vars.push_back(std::string(1, static_cast<char>('x' + x)));
    const std::size_t locs = static_cast<std::size_t>(pick(rng, std::min<std::int64_t>(2, static_cast<std::int64_t>(shape.max_locations)), static_cast<std::int64_t>(shape.max_locations)));
    for (std::size_t l = 0; l < locs; ++l) {
        tbreach::Location loc{"l" + std::to_string(l), {}, tbreach::Guard::top()};
        for (std::size_t x = 0; x < n; ++x) {
            if (shape.interval_rates && coin(rng, 0.2)) {
                const std::int64_t a = pick(rng, 0, 1);
                loc.rates.push_back(Interval::closed(a, a + 1));
            } else {
                loc.rates.push_back(Interval::point(pick(rng, 0, 2)));
            }
            if (coin(rng, 0.3))
                loc.invariant.atoms.push_back(
                    tbreach::Atom::rect(x, Interval::at_most(pick(rng, 1, shape.cmax), true)));
        }
        h.locations.push_back(std::move(loc));
    }
    const std::size_t edges = static_cast<std::size_t>(pick(rng, 2, static_cast<std::int64_t>(shape.max_edges)));
    for (std::size_t k = 0; k < edges; ++k) {
        tbreach::Edge e;
        e.name = "e" + std::to_string(k);
        e.src = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(locs) - 1));
        e.trg = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(locs) - 1));
        for (std::size_t x = 0; x < n; ++x)
            if (coin(rng, 0.5))
                e.guard.atoms.push_back(rect_atom(rng, x, shape.cmax, shape.strict_atoms));
        e.reset.resize(n);
        for (std::size_t x = 0; x < n; ++x) {
            if (!coin(rng, 0.4))
                continue;
            if (shape.nondeterministic_resets && coin(rng, 0.2))
                e.reset[x] = Interval::closed(0, pick(rng, 1, shape.cmax));
            else
                e.reset[x] = Interval::point(coin(rng, 0.8) ? 0 : pick(rng, 1, shape.cmax));
        }
        h.edges.push_back(std::move(e));
    }
    h.init = 0;
    return h;
}


// Automaton for syntactic path experiments: arbitrary graph, singular or
// interval rates, resets; guards are irrelevant to contraction.
inline tbreach::Automaton random_graph(Rng& rng, std::size_t max_locations = 4, std::size_t max_edges = 6,
                                       std::size_t max_vars = 2)
{
    using tbreach::Interval;
    tbreach::Automaton h;
    h.name = "graph";
    const std::size_t n = static_cast<std::size_t>(pick(rng, 1, static_cast<std::int64_t>(max_vars)));
    for (std::size_t x = 0; x < n; ++x)
        h.vars.push_back(std::string(1, static_cast<char>('x' + x)));
    const std::size_t locs = static_cast<std::size_t>(pick(rng, 1, static_cast<std::int64_t>(max_locations)));
    for (std::size_t l = 0; l < locs; ++l) {
        tbreach::Location loc{"l" + std::to_string(l), {}, tbreach::Guard::top()};
        for (std::size_t x = 0; x < n; ++x) {
            const std::int64_t a = pick(rng, 0, 3);
            loc.rates.push_back(coin(rng, 0.25) ? Interval::closed(a, a + pick(rng, 1, 2)) : Interval::point(a));
        }
        h.locations.push_back(std::move(loc));
    }
    const std::size_t edges = static_cast<std::size_t>(pick(rng, 1, static_cast<std::int64_t>(max_edges)));
    for (std::size_t k = 0; k < edges; ++k) {
        tbreach::Edge e;
        e.name = "e" + std::to_string(k);
        e.src = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(locs) - 1));
        e.trg = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(locs) - 1));
        e.reset.resize(n);
        for (std::size_t x = 0; x < n; ++x)
            if (coin(rng, 0.3))
                e.reset[x] = Interval::point(0);
        h.edges.push_back(std::move(e));
    }
    h.init = h.edges.front().src;
    return h;
}

// Random walk from Init with random delays and, for interval rates, random
// rate choices inside the interval.
inline tbreach::TimedPath random_walk(Rng& rng, const tbreach::Automaton& h, std::size_t max_len)
{
    tbreach::TimedPath p;
    const auto out = h.out_edges();
    std::size_t l = h.init;
    const std::size_t len = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(max_len)));
    while (p.size() < len && !out[l].empty()) {
        tbreach::TimedStep s;
        s.edge = out[l][static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(out[l].size()) - 1))];
        s.delay = coin(rng, 0.15) ? tbreach::Rational(0) : rational(rng, 5, 7);
        bool singular = true;
        for (const auto& r : h.locations[l].rates)
            singular = singular && r.is_singular();
        if (!singular)
            for (const auto& r : h.locations[l].rates) {
                const tbreach::Rational lo(static_cast<long>(r.lo.value));
                const tbreach::Rational hi(static_cast<long>(r.hi.value));
                s.rates.push_back(lo + (hi - lo) * rational(rng, 4, 4));
                if (s.rates.back() > hi)
                    s.rates.back() = hi;
            }
        p.push_back(std::move(s));
        l = h.edges[p.back().edge].trg;
    }
    return p;
}

// Equality-free run of an H1-H3 automaton (guards True only) with total
// duration <= budget, strictly positive delays outside `instant`.
inline tbreach::Run random_equality_free_run(Rng& rng, const tbreach::Automaton& h, std::size_t instant,
                                            const tbreach::Rational& budget, std::size_t max_len)
{
    using tbreach::Rational;
    const auto out = h.out_edges();
    tbreach::Run run{tbreach::initial_state(h), {}};
    tbreach::State cur = run.initial;
    Rational left = budget;
    const std::size_t len = static_cast<std::size_t>(pick(rng, 1, static_cast<std::int64_t>(max_len)));
    while (run.steps.size() < len) {
        Rational d = 0;
        if (cur.loc != instant) {
            d = left * rational(rng, 1, 1) * Rational(1, 4);
            if (d == 0)
                d = left / 8;
            if (d <= 0)
                break;
        }
        tbreach::State waited;
        try {
            waited = tbreach::time_step(h, cur, d, {});
        } catch (const std::exception&) {
            break;
        }
        std::vector<std::pair<std::size_t, tbreach::State>> options;
        for (std::size_t e : out[cur.loc]) {
            if (!h.edges[e].guard.is_true())
                continue;
            tbreach::State post = tbreach::edge_step(h, waited, e);
            if (tbreach::eval_guard(h.locations[post.loc].invariant, post.val))
                options.emplace_back(e, std::move(post));
        }
        if (options.empty())
            break;
        auto& [e, post] = options[static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(options.size()) - 1))];
        run.steps.push_back({tbreach::TimedStep{d, {}, e}, post});
        cur = post;
        left -= d;
    }
    return run;
}

// Arbitrary (not necessarily rectangular) models for parser round trips, and
// text mutations for diagnostic fuzzing.

inline std::string ident(Rng& rng, const char* prefix)
{
    static const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789_.";
    std::string s = prefix;
    const auto n = pick(rng, 0, 4);
    for (std::int64_t i = 0; i < n; ++i)
        s.push_back(chars[static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(chars.size()) - 1))]);
    return s;
}

inline tbreach::Interval any_interval(Rng& rng)
{
    const std::int64_t a = pick(rng, -20, 20);
    const std::int64_t b = pick(rng, a, 25);
    switch (pick(rng, 0, 5)) {
    case 0: return tbreach::Interval::point(a);
    case 1: return tbreach::Interval::at_most(b, coin(rng));
    case 2: return tbreach::Interval::at_least(a, coin(rng));
    case 3: return tbreach::Interval::everything();
    default: break;
    }
    if (a == b)
        return tbreach::Interval::point(a);
    return tbreach::Interval::make(tbreach::Bound::finite(a), coin(rng), tbreach::Bound::finite(b), coin(rng));
}

inline tbreach::Guard any_guard(Rng& rng, std::size_t vars)
{
    if (coin(rng, 0.05))
        return tbreach::Guard::bottom();
    tbreach::Guard g;
    if (vars == 0)
        return g;
    const auto n = pick(rng, 0, 3);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto x = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(vars) - 1));
        if (coin(rng, 0.3)) {
            const auto y = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(vars) - 1));
            g.atoms.push_back(tbreach::Atom::diag(x, y, static_cast<tbreach::Rel>(pick(rng, 0, 4)), pick(rng, -9, 9)));
        } else {
            g.atoms.push_back(tbreach::Atom::rect(x, any_interval(rng)));
        }
    }
    return g;
}

inline tbreach::Automaton any_automaton(Rng& rng)
{
    tbreach::Automaton h;
    h.name = ident(rng, "m");
    const auto nv = static_cast<std::size_t>(pick(rng, 0, 3));
    for (std::size_t x = 0; x < nv; ++x)
        h.vars.push_back("v" + std::to_string(x) + ident(rng, "_"));
    const auto nl = static_cast<std::size_t>(pick(rng, 1, 4));
    for (std::size_t l = 0; l < nl; ++l) {
        tbreach::Location loc{"q" + std::to_string(l) + ident(rng, ""), {}, any_guard(rng, nv)};
        for (std::size_t x = 0; x < nv; ++x)
            loc.rates.push_back(any_interval(rng));
        h.locations.push_back(std::move(loc));
    }
    const auto ne = static_cast<std::size_t>(pick(rng, 0, 5));
    for (std::size_t k = 0; k < ne; ++k) {
        tbreach::Edge e;
        e.name = "t" + std::to_string(k) + ident(rng, "");
        e.src = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(nl) - 1));
        e.trg = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(nl) - 1));
        e.guard = any_guard(rng, nv);
        e.reset.resize(nv);
        for (std::size_t x = 0; x < nv; ++x)
            if (coin(rng, 0.4))
                e.reset[x] = coin(rng) ? tbreach::Interval::point(pick(rng, -5, 5)) : any_interval(rng);
        h.edges.push_back(std::move(e));
    }
    h.init = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(nl) - 1));
    return h;
}

inline std::string mutate(Rng& rng, std::string s)
{
    static const std::string junk = " \n;:{}[]()<>=&-+,/#0123456789abxyinf$@";
    const auto n = pick(rng, 1, 3);
    for (std::int64_t i = 0; i < n && !s.empty(); ++i) {
        const auto pos = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(s.size()) - 1));
        switch (pick(rng, 0, 2)) {
        case 0: s.erase(pos, static_cast<std::size_t>(pick(rng, 1, 6))); break;
        case 1:
            s.insert(pos, 1, junk[static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(junk.size()) - 1))]);
            break;
        default: s = s.substr(0, pos); break;
        }
    }
    return s;
}

} // namespace gen
