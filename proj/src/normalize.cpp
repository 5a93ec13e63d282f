#include "tbreach/normalize.hpp"

#include "tbreach/constraints.hpp"
#include "tbreach/format.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace tbreach {

namespace {

std::string join(const std::vector<std::size_t>& xs)
{
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k)
            out += '_';
        out += std::to_string(xs[k]);
    }
    return out;
}

std::string join(const std::vector<std::int64_t>& xs)
{
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k)
            out += '_';
        out += std::to_string(xs[k]);
    }
    return out;
}

void require_rectangular(const Guard& g, const std::string& where)
{
    for (const Atom& a : g.atoms)
        if (a.kind == Atom::Kind::Diag)
            throw ModelError("diagonal atom in " + where);
}

void require_rectangular(const Automaton& h)
{
    for (const Location& l : h.locations)
        require_rectangular(l.invariant, "invariant of " + l.name);
    for (const Edge& e : h.edges)
        require_rectangular(e.guard, "guard of " + e.name);
}

void require_zero_resets(const Automaton& h)
{
    for (const Edge& e : h.edges)
        for (const auto& r : e.reset)
            if (r && !(*r == Interval::point(0)))
                throw ModelError("edge " + e.name + " has a reset other than := 0");
}

void require_non_negative(const Automaton& h)
{
    for (const Location& l : h.locations)
        for (const Interval& r : l.rates)
            if (!r.lo.is_finite() || r.lo.value < 0)
                throw ModelError("location " + l.name + " admits a negative rate");
}

Reset zero_reset(const Reset& r)
{
    Reset out(r.size());
    for (std::size_t x = 0; x < r.size(); ++x)
        if (r[x])
            out[x] = Interval::point(0);
    return out;
}

Bound negate(const Bound& b)
{
    switch (b.kind) {
    case Bound::Kind::NegInf: return Bound::pos_inf();
    case Bound::Kind::PosInf: return Bound::neg_inf();
    case Bound::Kind::Finite: break;
    }
    return Bound::finite(-b.value);
}

Bound add(const Bound& a, const Bound& b)
{
    if (a.kind == Bound::Kind::NegInf || b.kind == Bound::Kind::NegInf)
        return Bound::neg_inf();
    if (a.kind == Bound::Kind::PosInf || b.kind == Bound::Kind::PosInf)
        return Bound::pos_inf();
    return Bound::finite(a.value + b.value);
}

// ------------------------------------------------------------ atom shapes

enum class Shape { Le, Lt, Eq, Ge, Gt };

Shape shape_of(const Atom& a)
{
    if (a.kind != Atom::Kind::Rect)
        throw ModelError("integer-part adaptation needs rectangular atoms");
    const Interval& i = a.interval;
    if (i.is_singular())
        return Shape::Eq;
    if (i.lo.kind == Bound::Kind::NegInf && i.hi.is_finite())
        return i.hi_closed ? Shape::Le : Shape::Lt;
    if (i.hi.kind == Bound::Kind::PosInf && i.lo.is_finite())
        return i.lo_closed ? Shape::Ge : Shape::Gt;
    throw ModelError("atom is not of the form x ~ k: x in " + format_interval(i));
}

std::int64_t constant_of(const Atom& a)
{
    const Interval& i = a.interval;
    return i.lo.is_finite() ? i.lo.value : i.hi.value;
}

// Three-valued static evaluation of x in I given x in K.
enum class Truth { True, False, Residual };

Truth evaluate(const Interval& i, const Interval& k)
{
    if (intersect(i, k).is_empty())
        return Truth::False;
    if (i.contains(k))
        return Truth::True;
    return Truth::Residual;
}

Interval knowledge(Status s)
{
    switch (s) {
    case Status::Zero: return Interval::point(0);
    case Status::Positive: return Interval::at_least(0, false);
    case Status::Unknown: break;
    }
    return Interval::at_least(0);
}

char status_char(Status s)
{
    switch (s) {
    case Status::Zero: return 'Z';
    case Status::Positive: return 'P';
    case Status::Unknown: break;
    }
    return 'U';
}

bool may_grow(const Interval& rate) { return rate.hi.kind == Bound::Kind::PosInf || rate.hi.value > 0; }

bool surely_grows(const Interval& rate)
{
    return rate.lo.is_finite() && (rate.lo.value > 0 || (rate.lo.value == 0 && !rate.lo_closed));
}

// Status after a strictly positive delay.
Status after_delay(Status s, const Interval& rate)
{
    if (!may_grow(rate))
        return s;
    if (surely_grows(rate))
        return Status::Positive;
    return s == Status::Positive ? Status::Positive : Status::Unknown;
}

} // namespace

// ---------------------------------------------------------------- adapt

Interval interval_difference(const Interval& i, const Interval& j)
{
    return Interval::make(add(i.lo, negate(j.hi)), i.lo_closed && j.hi_closed,
                          add(i.hi, negate(j.lo)), i.hi_closed && j.lo_closed);
}

Guard adapt_reset(const Guard& g, const ResetContext& rho)
{
    if (g.falsum)
        return g;
    Guard out;
    for (const Atom& a : g.atoms) {
        if (a.kind == Atom::Kind::Diag)
            throw ModelError("reset adaptation needs rectangular atoms");
        out.atoms.push_back(Atom::rect(a.x, interval_difference(a.interval, rho.at(a.x))));
    }
    return out;
}

Guard split_guard(const Guard& g)
{
    if (g.falsum)
        return g;
    Guard out;
    for (const Atom& a : g.atoms) {
        const Interval& i = a.interval;
        if (a.kind == Atom::Kind::Diag || i.is_singular() || i.is_empty()) {
            out.atoms.push_back(a);
            continue;
        }
        if (i.lo.is_finite())
            out.atoms.push_back(Atom::rect(a.x, Interval::at_least(i.lo.value, i.lo_closed)));
        if (i.hi.is_finite())
            out.atoms.push_back(Atom::rect(a.x, Interval::at_most(i.hi.value, i.hi_closed)));
    }
    return out;
}

Guard adapt_int(const Guard& g, const IntegerPart& ip)
{
    if (g.falsum)
        return g;
    Guard out;
    for (const Atom& a : g.atoms) {
        if (a.interval.is_universal())
            continue;
        const Shape s = shape_of(a);
        const std::int64_t k = constant_of(a);
        const std::int64_t i = ip.at(a.x);
        std::optional<Interval> r; // nullopt: True
        bool f = false;
        switch (s) {
        case Shape::Le:
            if (k < i) f = true;
            else if (k == i) r = Interval::point(0);
            break;
        case Shape::Lt:
            if (k <= i) f = true;
            else if (k == i + 1) r = Interval::at_most(1, false);
            break;
        case Shape::Eq:
            if (k == i) r = Interval::point(0);
            else f = true;
            break;
        case Shape::Ge:
            if (k > i + 1) f = true;
            else if (k == i + 1) r = Interval::point(1);
            break;
        case Shape::Gt:
            if (k > i) f = true;
            else if (k == i) r = Interval::at_least(0, false);
            break;
        }
        if (f)
            return Guard::bottom();
        if (r)
            out.atoms.push_back(Atom::rect(a.x, *r));
    }
    return out;
}

// ---------------------------------------------------------------- dreset

DresetResult dreset(const Automaton& h)
{
    require_rectangular(h);
    const std::size_t n = h.vars.size();

    std::vector<Interval> pool{Interval::point(0)};
    auto index_of = [&](const Interval& i) {
        auto it = std::find(pool.begin(), pool.end(), i);
        if (it != pool.end())
            return static_cast<std::size_t>(it - pool.begin());
        pool.push_back(i);
        return pool.size() - 1;
    };
    for (const Edge& e : h.edges)
        for (const auto& r : e.reset)
            if (r)
                index_of(*r);

    DresetResult res;
    res.automaton.name = h.name;
    res.automaton.vars = h.vars;

    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> ids;
    std::vector<std::vector<std::size_t>> codes;
    std::deque<std::size_t> queue;

    auto context = [&](const std::vector<std::size_t>& code) {
        ResetContext rho;
        for (std::size_t c : code)
            rho.push_back(pool[c]);
        return rho;
    };
    auto intern = [&](std::size_t loc, const std::vector<std::size_t>& code) {
        auto [it, fresh] = ids.emplace(std::make_pair(loc, code), res.automaton.locations.size());
        if (fresh) {
            const Location& l = h.locations[loc];
            ResetContext rho = context(code);
            res.automaton.locations.push_back({l.name + ".r" + join(code), l.rates,
                                               reduce_guard(adapt_reset(l.invariant, rho))});
            res.loc_map.push_back(loc);
            res.contexts.push_back(rho);
            codes.push_back(code);
            queue.push_back(it->second);
        }
        return it->second;
    };

    res.automaton.init = intern(h.init, std::vector<std::size_t>(n, 0));
    const auto out = h.out_edges();
    while (!queue.empty()) {
        const std::size_t id = queue.front();
        queue.pop_front();
        const std::size_t loc = res.loc_map[id];
        const std::vector<std::size_t> code = codes[id];
        const ResetContext rho = res.contexts[id];
        for (std::size_t ei : out[loc]) {
            const Edge& e = h.edges[ei];
            Guard g = reduce_guard(adapt_reset(e.guard, rho));
            if (g.is_false())
                continue;
            std::vector<std::size_t> next = code;
            for (std::size_t x = 0; x < n; ++x)
                if (e.reset[x])
                    next[x] = index_of(*e.reset[x]);
            const std::size_t trg = intern(e.trg, next);
            res.automaton.edges.push_back({e.name + ".r" + join(code), id, trg, std::move(g), zero_reset(e.reset)});
            res.edge_map.push_back(ei);
        }
    }
    return res;
}

// ---------------------------------------------------------------- cbound

CboundResult cbound(const Automaton& h)
{
    require_rectangular(h);
    require_zero_resets(h);
    require_non_negative(h);
    const std::size_t n = h.vars.size();

    CboundResult res;
    res.cmax = cmax(h);
    const std::int64_t top = res.cmax + 1;
    res.automaton.name = h.name;
    res.automaton.vars = h.vars;

    Guard unit;
    for (std::size_t x = 0; x < n; ++x)
        unit.atoms.push_back(Atom::rect(x, Interval::at_most(1)));

    std::map<std::pair<std::size_t, IntegerPart>, std::size_t> ids;
    std::deque<std::size_t> queue;
    auto intern = [&](std::size_t loc, const IntegerPart& i) {
        auto [it, fresh] = ids.emplace(std::make_pair(loc, i), res.automaton.locations.size());
        if (fresh) {
            const Location& l = h.locations[loc];
            Guard inv = reduce_guard(conjoin(unit, adapt_int(split_guard(l.invariant), i)));
            res.automaton.locations.push_back({l.name + ".i" + join(i), l.rates, std::move(inv)});
            res.loc_map.push_back(loc);
            res.parts.push_back(i);
            queue.push_back(it->second);
        }
        return it->second;
    };

    res.automaton.init = intern(h.init, IntegerPart(n, 0));
    const auto out = h.out_edges();
    while (!queue.empty()) {
        const std::size_t id = queue.front();
        queue.pop_front();
        const std::size_t loc = res.loc_map[id];
        const IntegerPart i = res.parts[id];
        for (std::size_t ei : out[loc]) {
            const Edge& e = h.edges[ei];
            Guard g = reduce_guard(adapt_int(split_guard(e.guard), i));
            if (g.is_false())
                continue;
            IntegerPart next = i;
            for (std::size_t x = 0; x < n; ++x)
                if (e.reset[x])
                    next[x] = 0;
            const std::size_t trg = intern(e.trg, next);
            res.automaton.edges.push_back({e.name + ".i" + join(i), id, trg, std::move(g), e.reset});
            res.edge_map.push_back(ei);
            res.wrap_var.push_back(std::nullopt);
        }
        for (std::size_t x = 0; x < n; ++x) {
            IntegerPart next = i;
            next[x] = std::min(i[x] + 1, top);
            const std::size_t trg = intern(loc, next);
            Reset r(n);
            r[x] = Interval::point(0);
            res.automaton.edges.push_back({res.automaton.locations[id].name + ".w_" + h.vars[x], id, trg,
                                           Guard::of({Atom::rect(x, Interval::point(1))}), std::move(r)});
            res.edge_map.push_back(std::nullopt);
            res.wrap_var.push_back(x);
        }
    }
    return res;
}

// ---------------------------------------------------------------- strict

namespace {

class StrictBuilder {
public:
    StrictBuilder(const Automaton& h, BurstObserver* observer)
        : h_(h), observer_(observer), out_(h.out_edges()), n_(h.vars.size())
    {
        res_.automaton.name = h.name;
        res_.automaton.vars = h.vars;
    }

    StrictResult run()
    {
        std::string start_name = "start";
        while (h_.find_location(start_name))
            start_name += "_";
        Location start{start_name, std::vector<Interval>(n_, Interval::point(0)), Guard::top()};
        const std::vector<Interval> zero(n_, Interval::point(0));
        const Guard& init_inv = h_.locations[h_.init].invariant;
        if (init_inv.falsum)
            start.invariant = Guard::bottom();
        for (const Atom& a : init_inv.atoms)
            if (evaluate(a.interval, zero[a.x]) == Truth::False)
                start.invariant = Guard::bottom();
        res_.start = 0;
        res_.automaton.init = 0;
        res_.automaton.locations.push_back(std::move(start));
        res_.loc_map.push_back(h_.init);
        res_.status.push_back(std::vector<Status>(n_, Status::Zero));
        keys_.emplace_back();

        if (!res_.automaton.locations[0].invariant.falsum) {
            const std::vector<Status> zs(n_, Status::Zero);
            if (auto trg = intern(h_.init, zs))
                add_edge(0, *trg, Guard::top(), std::vector<bool>(n_, false), {}, observer_ ? observer_->initial() : 0,
                         "eps");
            expand(0, h_.init, zero, zs);
        }
        while (!queue_.empty()) {
            const std::size_t id = queue_.front();
            queue_.pop_front();
            const std::size_t loc = res_.loc_map[id];
            const Location& l = h_.locations[loc];
            std::vector<Interval> k(n_);
            std::vector<Status> fired(n_);
            for (std::size_t x = 0; x < n_; ++x) {
                fired[x] = after_delay(res_.status[id][x], l.rates[x]);
                k[x] = knowledge(fired[x]);
                for (const Atom& a : l.invariant.atoms)
                    if (a.x == x)
                        k[x] = intersect(k[x], a.interval);
            }
            expand(id, loc, k, fired);
        }
        return std::move(res_);
    }

private:
    // Arrival-time simplification of an invariant; nullopt when it cannot hold.
    std::optional<Guard> simplify_invariant(std::size_t loc, const std::vector<Status>& s) const
    {
        const Location& l = h_.locations[loc];
        if (l.invariant.falsum)
            return std::nullopt;
        Guard out;
        for (const Atom& a : l.invariant.atoms) {
            const Interval arrive = knowledge(s[a.x]);
            if (evaluate(a.interval, arrive) == Truth::False)
                return std::nullopt;
            const Interval stay =
                may_grow(l.rates[a.x]) ? Interval::make(arrive.lo, arrive.lo_closed, Bound::pos_inf(), false) : arrive;
            if (evaluate(a.interval, stay) != Truth::True)
                out.atoms.push_back(a);
        }
        return reduce_guard(out);
    }

    std::optional<std::size_t> intern(std::size_t loc, const std::vector<Status>& s)
    {
        auto key = std::make_pair(loc, s);
        if (auto it = ids_.find(key); it != ids_.end())
            return it->second;
        auto inv = simplify_invariant(loc, s);
        if (!inv)
            return std::nullopt;
        std::string name = h_.locations[loc].name + ".s";
        for (Status st : s)
            name += status_char(st);
        const std::size_t id = res_.automaton.locations.size();
        res_.automaton.locations.push_back({name, h_.locations[loc].rates, std::move(*inv)});
        res_.loc_map.push_back(loc);
        res_.status.push_back(s);
        keys_.emplace_back();
        ids_.emplace(key, id);
        queue_.push_back(id);
        return id;
    }

    void add_edge(std::size_t src, std::size_t trg, Guard g, const std::vector<bool>& reset,
                  std::vector<std::size_t> burst, std::size_t obs, std::string name = {})
    {
        auto key = std::make_tuple(trg, format_guard(g, h_.vars), reset, obs);
        if (!keys_[src].insert(key).second)
            return;
        Reset r(n_);
        for (std::size_t x = 0; x < n_; ++x)
            if (reset[x])
                r[x] = Interval::point(0);
        if (name.empty())
            name = "b" + std::to_string(res_.automaton.edges.size());
        res_.automaton.edges.push_back({std::move(name), src, trg, std::move(g), std::move(r)});
        res_.bursts.push_back(std::move(burst));
    }

    struct Partial {
        std::size_t loc;
        std::vector<Interval> k; // knowledge of every variable, resets applied
        std::vector<bool> reset;
        std::vector<Atom> atoms; // residual guard so far
        std::size_t obs;
        std::vector<std::size_t> path;
    };

    std::string partial_key(const Partial& p) const
    {
        std::string key = std::to_string(p.loc) + "|" + std::to_string(p.obs) + "|";
        for (std::size_t x = 0; x < n_; ++x)
            key += format_interval(p.k[x]) + (p.reset[x] ? "r" : "-");
        return key + "|" + format_guard(reduce_guard(Guard::of(p.atoms)), h_.vars);
    }

    // Breadth-first enumeration of zero-time bursts out of output location
    // `src` (input location `loc`), given the knowledge and status at firing.
    void expand(std::size_t src, std::size_t loc, const std::vector<Interval>& k, const std::vector<Status>& fired)
    {
        std::set<std::string> seen;
        std::deque<Partial> work;
        work.push_back({loc, k, std::vector<bool>(n_, false), {}, observer_ ? observer_->initial() : 0, {}});
        seen.insert(partial_key(work.front()));
        while (!work.empty()) {
            Partial p = std::move(work.front());
            work.pop_front();
            for (std::size_t ei : out_[p.loc]) {
                const Edge& e = h_.edges[ei];
                Partial q{e.trg, p.k, p.reset, p.atoms, p.obs, p.path};
                q.path.push_back(ei);
                if (!absorb(e.guard, q.k, q.atoms))
                    continue;
                for (std::size_t x = 0; x < n_; ++x)
                    if (e.reset[x]) {
                        q.reset[x] = true;
                        q.k[x] = Interval::point(0);
                    }
                if (observer_) {
                    auto o = observer_->step(q.obs, ei);
                    if (!o)
                        continue;
                    q.obs = *o;
                }
                emit(src, fired, q);
                if (!absorb(h_.locations[e.trg].invariant, q.k, q.atoms))
                    continue;
                if (seen.insert(partial_key(q)).second)
                    work.push_back(std::move(q));
            }
        }
    }

    // Adds the residual atoms of g; false if g is statically unsatisfiable.
    bool absorb(const Guard& g, std::vector<Interval>& k, std::vector<Atom>& atoms) const
    {
        if (g.falsum)
            return false;
        for (const Atom& a : g.atoms) {
            switch (evaluate(a.interval, k[a.x])) {
            case Truth::False: return false;
            case Truth::True: break;
            case Truth::Residual:
                atoms.push_back(a);
                k[a.x] = intersect(k[a.x], a.interval);
                break;
            }
        }
        return true;
    }

    void emit(std::size_t src, const std::vector<Status>& fired, const Partial& q)
    {
        for (const Atom& a : q.atoms)
            if (a.interval == Interval::point(1) && !q.reset[a.x])
                return;
        std::vector<Status> s(n_);
        bool any_reset = false;
        for (std::size_t x = 0; x < n_; ++x) {
            s[x] = q.reset[x] ? Status::Zero : fired[x];
            any_reset = any_reset || q.reset[x];
        }
        auto t = intern(q.loc, s);
        if (!t)
            return;
        Guard g = reduce_guard(Guard::of(q.atoms));
        if (*t == src && g.is_true() && !any_reset)
            return; // an idle self-loop only splits a delay
        add_edge(src, *t, std::move(g), q.reset, q.path, q.obs);
    }

    using EdgeKey = std::tuple<std::size_t, std::string, std::vector<bool>, std::size_t>;

    const Automaton& h_;
    BurstObserver* observer_;
    std::vector<std::vector<std::size_t>> out_;
    std::size_t n_;
    StrictResult res_;
    std::map<std::pair<std::size_t, std::vector<Status>>, std::size_t> ids_;
    std::vector<std::set<EdgeKey>> keys_;
    std::deque<std::size_t> queue_;
};

// Relation between the input automaton's values before and after a burst
// (nondeterministic resets included), as a polyhedron over (pre, post).
class ShadowObserver : public BurstObserver {
public:
    ShadowObserver(const Automaton& h, const std::vector<std::int64_t>& origin)
        : h_(h), origin_(origin), n_(h.vars.size())
    {
    }

    std::size_t initial() override
    {
        lra::LinearSystem s = frame();
        for (std::size_t x = 0; x < n_; ++x)
            s.add(lra::eq(pre(x), post(x)));
        return intern(s);
    }

    std::optional<std::size_t> step(std::size_t state, std::size_t edge) override
    {
        if (origin_[edge] < 0)
            return state;
        const Edge& o = h_.edges[static_cast<std::size_t>(origin_[edge])];
        lra::LinearSystem s = systems_[state];
        std::vector<lra::LinearTerm> cur;
        for (std::size_t x = 0; x < n_; ++x)
            cur.push_back(post(x));
        s.add_all(guard_constraints(o.guard, cur));
        lra::Unknown next = static_cast<lra::Unknown>(2 * n_);
        std::vector<lra::Unknown> keep;
        std::map<lra::Unknown, lra::Unknown> back;
        for (std::size_t x = 0; x < n_; ++x) {
            keep.push_back(static_cast<lra::Unknown>(x));
            const lra::Unknown v = next++;
            s.declare(v);
            keep.push_back(v);
            back[v] = static_cast<lra::Unknown>(n_ + x);
            const lra::LinearTerm nv = lra::LinearTerm::var(v);
            if (o.reset[x]) {
                std::vector<lra::LinearConstraint> cs;
                interval_constraints(*o.reset[x], nv, cs);
                s.add_all(cs);
            } else {
                s.add(lra::eq(nv, cur[x]));
            }
        }
        std::vector<lra::LinearTerm> after;
        for (std::size_t x = 0; x < n_; ++x)
            after.push_back(lra::LinearTerm::var(static_cast<lra::Unknown>(2 * n_ + x)));
        s.add_all(guard_constraints(h_.locations[o.trg].invariant, after));
        const lra::LinearSystem p = lra::project(s, keep);
        lra::LinearSystem r = frame();
        for (const auto& c : p.constraints())
            r.add({c.term.rename(back), c.rel});
        if (!lra::is_feasible(r))
            return std::nullopt;
        return intern(lra::remove_redundant(r));
    }

private:
    lra::LinearTerm pre(std::size_t x) const { return lra::LinearTerm::var(static_cast<lra::Unknown>(x)); }
    lra::LinearTerm post(std::size_t x) const { return lra::LinearTerm::var(static_cast<lra::Unknown>(n_ + x)); }

    lra::LinearSystem frame() const
    {
        lra::LinearSystem s;
        for (lra::Unknown u = 0; u < 2 * n_; ++u)
            s.declare(u);
        return s;
    }

    std::size_t intern(const lra::LinearSystem& s)
    {
        auto [it, fresh] = ids_.emplace(canonical_key(s), systems_.size());
        if (fresh)
            systems_.push_back(s);
        return it->second;
    }

    const Automaton& h_;
    const std::vector<std::int64_t>& origin_;
    std::size_t n_;
    std::vector<lra::LinearSystem> systems_;
    std::map<std::string, std::size_t> ids_;
};

} // namespace

StrictResult strict(const Automaton& h, BurstObserver* observer)
{
    require_rectangular(h);
    require_zero_resets(h);
    require_non_negative(h);
    return StrictBuilder(h, observer).run();
}

// ---------------------------------------------------------------- pipeline

Normalized normalize_pipeline(const Automaton& h, std::size_t goal)
{
    if (goal >= h.locations.size())
        throw ModelError("goal location out of range");
    const Classification c = classify(h);
    if (!c.diagonal_free)
        throw ClassError("diagonal constraints are outside the decidable class");
    if (!c.non_negative)
        throw ClassError("negative rates are outside the decidable class");

    Normalized out;
    out.h1 = dreset(h);
    out.h2 = cbound(out.h1.automaton);
    std::vector<std::int64_t> origin;
    for (const auto& e : out.h2.edge_map)
        origin.push_back(e ? static_cast<std::int64_t>(out.h1.edge_map[*e]) : -1);
    bool exact = true;
    for (const Edge& e : h.edges)
        for (const auto& r : e.reset)
            exact = exact && (!r || r->is_singular());
    if (exact) {
        out.h3 = strict(out.h2.automaton);
    } else {
        ShadowObserver shadow(h, origin);
        out.h3 = strict(out.h2.automaton, &shadow);
    }

    for (std::size_t l = 0; l < out.h3.automaton.locations.size(); ++l) {
        const std::size_t orig = out.h1.loc_map[out.h2.loc_map[out.h3.loc_map[l]]];
        out.loc_to_original.push_back(orig);
        if (orig == goal)
            out.goal_set.push_back(l);
    }
    for (const auto& burst : out.h3.bursts) {
        std::vector<std::size_t> es;
        for (std::size_t e : burst)
            if (origin[e] >= 0)
                es.push_back(static_cast<std::size_t>(origin[e]));
        out.edge_to_original.push_back(std::move(es));
    }
    return out;
}

std::vector<std::string> check_h123(const Automaton& h)
{
    std::vector<std::string> v;
    for (const Location& l : h.locations)
        for (std::size_t x = 0; x < l.rates.size(); ++x) {
            if (!l.rates[x].is_singular())
                v.push_back("H1: rate of " + h.vars[x] + " in " + l.name + " is not singular");
            else if (l.rates[x].lo.value < 0)
                v.push_back("H1: rate of " + h.vars[x] + " in " + l.name + " is negative");
        }
    for (const Edge& e : h.edges) {
        for (std::size_t x = 0; x < e.reset.size(); ++x)
            if (e.reset[x] && !(*e.reset[x] == Interval::point(0)))
                v.push_back("H2: edge " + e.name + " resets " + h.vars[x] + " to something other than 0");
        if (e.guard.falsum)
            continue;
        for (const Atom& a : e.guard.atoms) {
            if (a.kind != Atom::Kind::Rect || !(a.interval == Interval::point(1)))
                v.push_back("H3: edge " + e.name + " has guard atom " + format_atom(a, h.vars));
            else if (!e.reset[a.x])
                v.push_back("H3: edge " + e.name + " tests " + h.vars[a.x] + " = 1 without resetting it");
        }
    }
    return v;
}

} // namespace tbreach
