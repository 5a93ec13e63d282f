#include "tbreach/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace tbreach {

// ---------------------------------------------------------------- intervals

namespace {

// Orders lower bounds from loosest to tightest.
int cmp_lower(const Bound& a, bool ac, const Bound& b, bool bc)
{
    auto rank = [](const Bound& x) { return x.kind == Bound::Kind::NegInf ? 0 : x.kind == Bound::Kind::Finite ? 1 : 2; };
    if (rank(a) != rank(b))
        return rank(a) < rank(b) ? -1 : 1;
    if (!a.is_finite())
        return 0;
    if (a.value != b.value)
        return a.value < b.value ? -1 : 1;
    if (ac == bc)
        return 0;
    return ac ? -1 : 1;
}

// Orders upper bounds from tightest to loosest.
int cmp_upper(const Bound& a, bool ac, const Bound& b, bool bc)
{
    auto rank = [](const Bound& x) { return x.kind == Bound::Kind::NegInf ? 0 : x.kind == Bound::Kind::Finite ? 1 : 2; };
    if (rank(a) != rank(b))
        return rank(a) < rank(b) ? -1 : 1;
    if (!a.is_finite())
        return 0;
    if (a.value != b.value)
        return a.value < b.value ? -1 : 1;
    if (ac == bc)
        return 0;
    return ac ? 1 : -1;
}

void collect_guard_constants(const Guard& g, std::int64_t& m)
{
    for (const Atom& a : g.atoms) {
        if (a.kind == Atom::Kind::Diag) {
            m = std::max<std::int64_t>(m, std::llabs(a.constant));
            continue;
        }
        if (a.interval.lo.is_finite())
            m = std::max<std::int64_t>(m, std::llabs(a.interval.lo.value));
        if (a.interval.hi.is_finite())
            m = std::max<std::int64_t>(m, std::llabs(a.interval.hi.value));
    }
}

} // namespace

Interval Interval::make(Bound lo, bool lo_closed, Bound hi, bool hi_closed)
{
    Interval i{lo, hi, lo_closed, hi_closed};
    if (!lo.is_finite())
        i.lo_closed = false;
    if (!hi.is_finite())
        i.hi_closed = false;
    return i;
}

bool Interval::is_empty() const
{
    if (lo.kind == Bound::Kind::PosInf || hi.kind == Bound::Kind::NegInf)
        return true;
    if (!lo.is_finite() || !hi.is_finite())
        return false;
    if (lo.value > hi.value)
        return true;
    return lo.value == hi.value && !(lo_closed && hi_closed);
}

bool Interval::contains(const Rational& q) const
{
    if (is_empty())
        return false;
    if (lo.is_finite()) {
        Rational l = from_int(lo.value);
        if (lo_closed ? q < l : q <= l)
            return false;
    }
    if (hi.is_finite()) {
        Rational h = from_int(hi.value);
        if (hi_closed ? q > h : q >= h)
            return false;
    }
    return true;
}

bool Interval::contains(const Interval& o) const
{
    if (o.is_empty())
        return true;
    if (is_empty())
        return false;
    return cmp_lower(lo, lo_closed, o.lo, o.lo_closed) <= 0 && cmp_upper(hi, hi_closed, o.hi, o.hi_closed) >= 0;
}

Interval intersect(const Interval& a, const Interval& b)
{
    Interval r;
    if (cmp_lower(a.lo, a.lo_closed, b.lo, b.lo_closed) >= 0) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    } else {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    }
    if (cmp_upper(a.hi, a.hi_closed, b.hi, b.hi_closed) <= 0) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    } else {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    }
    return Interval::make(r.lo, r.lo_closed, r.hi, r.hi_closed);
}

// ---------------------------------------------------------------- guards

Guard reduce_guard(const Guard& g)
{
    if (g.falsum)
        return Guard::bottom();
    Guard out;
    for (const Atom& a : g.atoms) {
        if (a.kind == Atom::Kind::Rect) {
            if (a.interval.is_empty())
                return Guard::bottom();
            if (a.interval.is_universal())
                continue;
        }
        if (std::find(out.atoms.begin(), out.atoms.end(), a) == out.atoms.end())
            out.atoms.push_back(a);
    }
    return out;
}

Guard conjoin(const Guard& a, const Guard& b)
{
    if (a.falsum || b.falsum)
        return Guard::bottom();
    Guard g = a;
    g.atoms.insert(g.atoms.end(), b.atoms.begin(), b.atoms.end());
    return reduce_guard(g);
}

// ---------------------------------------------------------------- automata

std::optional<std::size_t> Automaton::find_location(const std::string& n) const
{
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (locations[i].name == n)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> Automaton::find_edge(const std::string& n) const
{
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].name == n)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> Automaton::find_var(const std::string& n) const
{
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == n)
            return i;
    return std::nullopt;
}

std::size_t Automaton::location(const std::string& n) const
{
    if (auto i = find_location(n))
        return *i;
    throw ModelError("unknown location '" + n + "'");
}

std::size_t Automaton::edge(const std::string& n) const
{
    if (auto i = find_edge(n))
        return *i;
    throw ModelError("unknown edge '" + n + "'");
}

std::vector<std::vector<std::size_t>> Automaton::out_edges() const
{
    std::vector<std::vector<std::size_t>> out(locations.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        out[edges[e].src].push_back(e);
    return out;
}

void Automaton::validate() const
{
    const std::size_t n = vars.size();
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != n)
        throw ModelError("duplicate variable");
    if (locations.empty())
        throw ModelError("automaton has no locations");
    if (init >= locations.size())
        throw ModelError("initial location out of range");

    auto check_guard = [&](const Guard& g, const std::string& where) {
        for (const Atom& a : g.atoms)
            if (a.x >= n || (a.kind == Atom::Kind::Diag && a.y >= n))
                throw ModelError("variable index out of range in " + where);
    };

    std::set<std::string> names;
    for (const Location& l : locations) {
        if (!names.insert(l.name).second)
            throw ModelError("duplicate location '" + l.name + "'");
        if (l.rates.size() != n)
            throw ModelError("location '" + l.name + "' has wrong number of rates");
        check_guard(l.invariant, "invariant of '" + l.name + "'");
    }
    names.clear();
    for (const Edge& e : edges) {
        if (!names.insert(e.name).second)
            throw ModelError("duplicate edge '" + e.name + "'");
        if (e.src >= locations.size() || e.trg >= locations.size())
            throw ModelError("edge '" + e.name + "' has an endpoint out of range");
        if (e.reset.size() != n)
            throw ModelError("edge '" + e.name + "' has wrong reset arity");
        check_guard(e.guard, "guard of '" + e.name + "'");
    }
}

Classification classify(const Automaton& h)
{
    Classification c;
    for (const Location& l : h.locations) {
        for (const Interval& r : l.rates) {
            if (!r.is_singular())
                c.singular = false;
            if (!r.lo.is_finite() || r.lo.value < 0)
                c.non_negative = false;
            if (!r.lo.is_finite() || !r.hi.is_finite())
                c.bounded_rates = false;
        }
        for (const Atom& a : l.invariant.atoms)
            if (a.kind == Atom::Kind::Diag)
                c.rectangular = c.diagonal_free = false;
    }
    for (std::size_t x = 0; x < h.vars.size(); ++x)
        for (const Location& l : h.locations)
            if (!(l.rates[x] == h.locations.front().rates[x]))
                c.fixed_rate = false;
    c.multirate = !c.fixed_rate;

    for (const Edge& e : h.edges) {
        for (const Atom& a : e.guard.atoms)
            if (a.kind == Atom::Kind::Diag)
                c.rectangular = c.diagonal_free = false;
        for (std::size_t x = 0; x < h.vars.size(); ++x) {
            if (e.reset[x] && !e.reset[x]->is_singular())
                c.deterministic_resets = false;
            if (!(h.locations[e.src].rates[x] == h.locations[e.trg].rates[x]) && !e.reset[x])
                c.initialized = false;
        }
    }
    return c;
}

std::int64_t rmax(const Automaton& h)
{
    std::int64_t m = 0;
    for (const Location& l : h.locations)
        for (const Interval& r : l.rates) {
            if (r.lo.is_finite())
                m = std::max<std::int64_t>(m, std::llabs(r.lo.value));
            if (r.hi.is_finite())
                m = std::max<std::int64_t>(m, std::llabs(r.hi.value));
        }
    return m;
}

std::int64_t cmax(const Automaton& h)
{
    std::int64_t m = 0;
    for (const Location& l : h.locations)
        collect_guard_constants(l.invariant, m);
    for (const Edge& e : h.edges) {
        collect_guard_constants(e.guard, m);
        for (const auto& r : e.reset) {
            if (!r)
                continue;
            if (r->lo.is_finite())
                m = std::max<std::int64_t>(m, std::llabs(r->lo.value));
            if (r->hi.is_finite())
                m = std::max<std::int64_t>(m, std::llabs(r->hi.value));
        }
    }
    return m;
}

// ---------------------------------------------------------------- runs

State initial_state(const Automaton& h)
{
    return State{h.init, Valuation(h.vars.size(), Rational(0))};
}

Rational Run::duration() const
{
    Rational d = 0;
    for (const RunStep& s : steps)
        d += s.step.delay;
    return d;
}

TimedPath Run::path() const
{
    TimedPath p;
    p.reserve(steps.size());
    for (const RunStep& s : steps)
        p.push_back(s.step);
    return p;
}

} // namespace tbreach
