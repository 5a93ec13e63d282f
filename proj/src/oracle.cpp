#include "tbreach/oracle.hpp"

#include "tbreach/lra.hpp"

#include <map>

namespace tbreach {

using lra::LinearConstraint;
using lra::LinearSystem;
using lra::LinearTerm;
using lra::Unknown;

namespace {

Rational num(const Bound& b) { return Rational(static_cast<long>(b.value)); }

void in_interval(const Interval& i, const LinearTerm& v, LinearSystem& s)
{
    if (i.lo.is_finite())
        s.add(i.lo_closed ? lra::ge(v, num(i.lo)) : lra::gt(v, num(i.lo)));
    if (i.hi.is_finite())
        s.add(i.hi_closed ? lra::le(v, num(i.hi)) : lra::lt(v, num(i.hi)));
}

void holds(const Guard& g, const std::vector<LinearTerm>& v, LinearSystem& s)
{
    if (g.falsum) {
        s.add({LinearTerm(1), lra::Relation::Le});
        return;
    }
    for (const Atom& a : g.atoms) {
        if (a.kind == Atom::Kind::Rect) {
            in_interval(a.interval, v[a.x], s);
            continue;
        }
        const LinearTerm d = v[a.x] - v[a.y];
        const Rational c(static_cast<long>(a.constant));
        switch (a.rel) {
        case Rel::Lt: s.add(lra::lt(d, c)); break;
        case Rel::Le: s.add(lra::le(d, c)); break;
        case Rel::Eq: s.add(lra::eq(d, c)); break;
        case Rel::Ge: s.add(lra::ge(d, c)); break;
        case Rel::Gt: s.add(lra::gt(d, c)); break;
        }
    }
}

// A rate interval whose displacement bounds lo*t <= d <= hi*t do not force
// d = 0 at t = 0, or whose open ends need t > 0.
bool irregular(const Interval& r)
{
    return !r.is_singular() && (!r.lo.is_finite() || !r.hi.is_finite() || !r.lo_closed || !r.hi_closed);
}

class Search {
public:
    Search(const Automaton& h, const Rational& T) : h_(h), T_(T), n_(h.vars.size()) {}

    // Post-states of `pre` (over 0..n, tau = n) through edge e; zero delay
    // and positive delay are separate cases when `split`.
    std::optional<LinearSystem> successor(const LinearSystem& pre, std::size_t ei, int mode) const
    {
        const Edge& e = h_.edges[ei];
        const Location& l = h_.locations[e.src];
        const Unknown m = static_cast<Unknown>(n_ + 1);
        LinearSystem s;
        for (Unknown u = 0; u < 2 * m; ++u)
            s.declare(u);
        Unknown next = 2 * m;
        const Unknown t = next++;
        s.declare(t);
        const LinearTerm tt = LinearTerm::var(t);
        if (mode == 0)
            s.add(lra::eq(tt, 0));
        else if (mode == 1)
            s.add(lra::gt(tt, 0));
        else
            s.add(lra::ge(tt, 0));
        std::vector<LinearTerm> v(n_);
        for (std::size_t x = 0; x < n_; ++x) {
            const Interval& r = l.rates[x];
            v[x] = LinearTerm::var(static_cast<Unknown>(x));
            if (mode == 0)
                continue;
            if (r.is_singular()) {
                v[x] += tt * num(r.lo);
                continue;
            }
            const Unknown d = next++;
            s.declare(d);
            const LinearTerm dd = LinearTerm::var(d);
            if (r.lo.is_finite())
                s.add(r.lo_closed ? lra::ge(dd, tt * num(r.lo)) : lra::gt(dd, tt * num(r.lo)));
            if (r.hi.is_finite())
                s.add(r.hi_closed ? lra::le(dd, tt * num(r.hi)) : lra::lt(dd, tt * num(r.hi)));
            v[x] += dd;
        }
        holds(l.invariant, v, s);
        holds(e.guard, v, s);
        for (std::size_t x = 0; x < n_; ++x) {
            if (!e.reset[x])
                continue;
            const Unknown u = next++;
            s.declare(u);
            v[x] = LinearTerm::var(u);
            in_interval(*e.reset[x], v[x], s);
            if (e.reset[x]->is_singular())
                s.add(lra::eq(v[x], num(e.reset[x]->lo)));
        }
        std::vector<LinearTerm> after(n_);
        for (std::size_t x = 0; x < n_; ++x) {
            after[x] = LinearTerm::var(static_cast<Unknown>(m + x));
            s.add(lra::eq(after[x], v[x]));
        }
        holds(h_.locations[e.trg].invariant, after, s);
        const LinearTerm tau = LinearTerm::var(static_cast<Unknown>(2 * m - 1));
        s.add(lra::eq(tau, LinearTerm::var(static_cast<Unknown>(n_)) + tt));
        s.add(lra::le(tau, T_));
        s.add_all(pre.constraints());

        std::vector<Unknown> keep;
        std::map<Unknown, Unknown> back;
        for (Unknown u = 0; u < m; ++u) {
            keep.push_back(m + u);
            back[m + u] = u;
        }
        const LinearSystem p = lra::project(s, keep);
        LinearSystem out;
        for (Unknown u = 0; u < m; ++u)
            out.declare(u);
        for (const LinearConstraint& c : p.constraints())
            out.add({c.term.rename(back), c.rel});
        if (!lra::is_feasible(out))
            return std::nullopt;
        return out;
    }

private:
    const Automaton& h_;
    Rational T_;
    std::size_t n_;
};

} // namespace

const char* to_string(OracleVerdict v)
{
    switch (v) {
    case OracleVerdict::Yes: return "YES";
    case OracleVerdict::No: return "NO";
    case OracleVerdict::Unknown: break;
    }
    return "UNKNOWN";
}

OracleResult oracle_tb_reach(const Automaton& h, std::size_t goal, const Rational& T, const OracleOptions& opt)
{
    std::vector<bool> goals(h.locations.size(), false);
    goals.at(goal) = true;
    return oracle_tb_reach(h, goals, T, opt);
}

OracleResult oracle_tb_reach(const Automaton& h, const std::vector<bool>& goals, const Rational& T,
                             const OracleOptions& opt)
{
    OracleResult res;
    const std::size_t n = h.vars.size();
    LinearSystem init;
    std::vector<LinearTerm> zero(n, LinearTerm(0));
    for (Unknown u = 0; u <= n; ++u) {
        init.declare(u);
        init.add(lra::eq(LinearTerm::var(u), 0));
    }
    LinearSystem check = init;
    holds(h.locations[h.init].invariant, zero, check);
    if (!lra::is_feasible(check) || T < 0) {
        res.verdict = OracleVerdict::No;
        return res;
    }
    if (goals.at(h.init)) {
        res.verdict = OracleVerdict::Yes;
        res.nodes = 1;
        return res;
    }

    std::vector<std::vector<LinearSystem>> seen(h.locations.size());
    seen[h.init].push_back(init);
    std::vector<std::pair<std::size_t, LinearSystem>> frontier{{h.init, init}};
    const auto out = h.out_edges();
    const Search search(h, T);
    res.nodes = 1;
    for (std::size_t depth = 1; !frontier.empty(); ++depth) {
        if (depth > opt.max_depth) {
            res.depth = depth - 1;
            res.verdict = OracleVerdict::Unknown;
            return res;
        }
        std::vector<std::pair<std::size_t, LinearSystem>> next;
        for (const auto& [loc, poly] : frontier) {
            bool split = false;
            for (const Interval& r : h.locations[loc].rates)
                split = split || irregular(r);
            for (std::size_t e : out[loc]) {
                for (int mode : split ? std::vector<int>{0, 1} : std::vector<int>{2}) {
                    auto succ = search.successor(poly, e, mode);
                    if (!succ)
                        continue;
                    const std::size_t trg = h.edges[e].trg;
                    bool covered = false;
                    for (const LinearSystem& old : seen[trg])
                        if (lra::subset(*succ, old)) {
                            covered = true;
                            break;
                        }
                    if (covered)
                        continue;
                    ++res.nodes;
                    if (goals[trg]) {
                        res.verdict = OracleVerdict::Yes;
                        res.depth = depth;
                        return res;
                    }
                    if (res.nodes > opt.max_nodes) {
                        res.verdict = OracleVerdict::Unknown;
                        res.depth = depth;
                        return res;
                    }
                    seen[trg].push_back(*succ);
                    next.emplace_back(trg, std::move(*succ));
                }
            }
        }
        frontier = std::move(next);
        res.depth = depth;
    }
    res.verdict = OracleVerdict::No;
    return res;
}

} // namespace tbreach
