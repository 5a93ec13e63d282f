#include "tbreach/semantics.hpp"

#include "tbreach/format.hpp"

namespace tbreach {

namespace {

bool compare(const Rational& lhs, Rel rel, const Rational& rhs)
{
    switch (rel) {
    case Rel::Lt: return lhs < rhs;
    case Rel::Le: return lhs <= rhs;
    case Rel::Eq: return lhs == rhs;
    case Rel::Ge: return lhs >= rhs;
    case Rel::Gt: return lhs > rhs;
    }
    return false;
}

void require(const Automaton& h, const Guard& g, const Valuation& v, const std::string& what)
{
    if (g.falsum)
        throw StepRejected(what + " is false", std::nullopt);
    for (const Atom& a : g.atoms)
        if (!eval_atom(a, v))
            throw StepRejected(what + " violated: " + format_atom(a, h.vars), a);
}

} // namespace

bool eval_atom(const Atom& a, const Valuation& v)
{
    if (a.kind == Atom::Kind::Rect)
        return a.interval.contains(v[a.x]);
    return compare(v[a.x] - v[a.y], a.rel, from_int(a.constant));
}

bool eval_guard(const Guard& g, const Valuation& v)
{
    if (g.falsum)
        return false;
    for (const Atom& a : g.atoms)
        if (!eval_atom(a, v))
            return false;
    return true;
}

std::vector<Rational> resolve_rates(const Automaton& h, std::size_t loc, const std::vector<Rational>& rates)
{
    const Location& l = h.locations[loc];
    if (rates.empty()) {
        std::vector<Rational> r;
        r.reserve(h.vars.size());
        for (std::size_t x = 0; x < h.vars.size(); ++x) {
            if (!l.rates[x].is_singular())
                throw ModelError("rate of " + h.vars[x] + " in " + l.name + " is not singular; a rate must be given");
            r.push_back(from_int(l.rates[x].lo.value));
        }
        return r;
    }
    if (rates.size() != h.vars.size())
        throw ModelError("rate vector has wrong arity");
    for (std::size_t x = 0; x < h.vars.size(); ++x)
        if (!l.rates[x].contains(rates[x]))
            throw ModelError("rate " + to_string(rates[x]) + " of " + h.vars[x] + " outside " + format_interval(l.rates[x]) +
                             " in " + l.name);
    return rates;
}

State time_step(const Automaton& h, const State& s, const Rational& t, const std::vector<Rational>& rates)
{
    if (t < 0)
        throw ModelError("negative delay");
    auto r = resolve_rates(h, s.loc, rates);
    const Guard& inv = h.locations[s.loc].invariant;
    require(h, inv, s.val, "invariant of " + h.locations[s.loc].name);
    State out = s;
    for (std::size_t x = 0; x < out.val.size(); ++x)
        out.val[x] += r[x] * t;
    require(h, inv, out.val, "invariant of " + h.locations[s.loc].name);
    return out;
}

State edge_step(const Automaton& h, const State& s, std::size_t e, const std::vector<std::optional<Rational>>& chosen)
{
    const Edge& edge = h.edges.at(e);
    if (edge.src != s.loc)
        throw ModelError("edge " + edge.name + " does not leave " + h.locations[s.loc].name);
    require(h, edge.guard, s.val, "guard of " + edge.name);
    State out{edge.trg, s.val};
    for (std::size_t x = 0; x < out.val.size(); ++x) {
        const auto& r = edge.reset[x];
        if (!r)
            continue;
        if (x < chosen.size() && chosen[x]) {
            if (!r->contains(*chosen[x]))
                throw StepRejected("reset value " + to_string(*chosen[x]) + " for " + h.vars[x] + " outside " +
                                       format_interval(*r),
                                   std::nullopt);
            out.val[x] = *chosen[x];
        } else if (r->is_singular()) {
            out.val[x] = from_int(r->lo.value);
        } else {
            throw ModelError("nondeterministic reset of " + h.vars[x] + " on " + edge.name + " needs a chosen value");
        }
    }
    return out;
}

void check_chained(const Automaton& h, const TimedPath& path, std::optional<std::size_t> start)
{
    std::optional<std::size_t> at = start;
    for (const TimedStep& s : path) {
        if (s.edge >= h.edges.size())
            throw ModelError("edge index out of range");
        if (at && h.edges[s.edge].src != *at)
            throw ModelError("path is not chained at edge " + h.edges[s.edge].name);
        at = h.edges[s.edge].trg;
    }
}

ReplayResult replay(const Automaton& h, const State& s0, const TimedPath& path, const std::vector<ResetChoices>& choices)
{
    check_chained(h, path, s0.loc);
    ReplayResult res;
    Run run{s0, {}};
    State cur = s0;
    try {
        require(h, h.locations[cur.loc].invariant, cur.val, "invariant of " + h.locations[cur.loc].name);
        for (std::size_t i = 0; i < path.size(); ++i) {
            res.failed_step = i;
            const TimedStep& step = path[i];
            auto rates = resolve_rates(h, cur.loc, step.rates);
            cur = time_step(h, cur, step.delay, rates);
            cur = edge_step(h, cur, step.edge, i < choices.size() ? choices[i] : ResetChoices{});
            require(h, h.locations[cur.loc].invariant, cur.val, "invariant of " + h.locations[cur.loc].name);
            run.steps.push_back(RunStep{TimedStep{step.delay, rates, step.edge}, cur});
        }
    } catch (const StepRejected& e) {
        res.failure = e.what();
        return res;
    }
    res.run = std::move(run);
    return res;
}

ReplayResult replay_run(const Automaton& h, const Run& r)
{
    std::vector<ResetChoices> choices;
    for (const RunStep& s : r.steps) {
        const Edge& e = h.edges.at(s.step.edge);
        ResetChoices c(h.vars.size());
        for (std::size_t x = 0; x < h.vars.size() && x < e.reset.size(); ++x)
            if (e.reset[x] && !e.reset[x]->is_singular())
                c[x] = s.post.val.at(x);
        choices.push_back(std::move(c));
    }
    ReplayResult res = replay(h, r.initial, r.path(), choices);
    if (res.run && !(*res.run == r)) {
        res.failure = "replayed states differ from the recorded ones";
        res.run.reset();
    }
    return res;
}

std::optional<Run> run_of(const Automaton& h, const State& s0, const TimedPath& path)
{
    return replay(h, s0, path).run;
}

Rational duration(const TimedPath& path)
{
    Rational d = 0;
    for (const TimedStep& s : path)
        d += s.delay;
    return d;
}

Rational effect(const Automaton& h, const TimedPath& path, std::size_t x)
{
    Rational sum = 0;
    for (const TimedStep& s : path) {
        if (!s.rates.empty()) {
            sum += s.rates.at(x) * s.delay;
            continue;
        }
        const Interval& r = h.locations[h.edges.at(s.edge).src].rates.at(x);
        if (!r.is_singular())
            throw ModelError("effect needs explicit rates for non-singular locations");
        sum += from_int(r.lo.value) * s.delay;
    }
    return sum;
}

} // namespace tbreach
