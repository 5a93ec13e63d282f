#include "tbreach/decide.hpp"

#include "tbreach/contraction.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace tbreach {

using lra::LinearSystem;
using lra::LinearTerm;
using lra::Unknown;
using lra::Witness;

namespace {

Rational bound_value(const Bound& b) { return Rational(static_cast<long>(b.value)); }

// Some rate inside a non-empty interval.
Rational some_rate(const Interval& r)
{
    if (r.lo.is_finite() && r.lo_closed)
        return bound_value(r.lo);
    if (r.hi.is_finite() && r.hi_closed)
        return bound_value(r.hi);
    if (r.lo.is_finite() && r.hi.is_finite())
        return (bound_value(r.lo) + bound_value(r.hi)) / 2;
    if (r.lo.is_finite())
        return bound_value(r.lo) + 1;
    if (r.hi.is_finite())
        return bound_value(r.hi) - 1;
    return 0;
}

bool all_singular(const Location& l)
{
    for (const Interval& r : l.rates)
        if (!r.is_singular())
            return false;
    return true;
}

// lo*t <= d <= hi*t, with strict sides for open rate bounds when `positive`.
void rate_constraints(const Interval& r, const LinearTerm& d, const LinearTerm& t, bool positive,
                      std::vector<lra::LinearConstraint>& out)
{
    if (r.lo.is_finite()) {
        const LinearTerm lo = t * bound_value(r.lo);
        out.push_back(r.lo_closed || !positive ? lra::ge(d, lo) : lra::gt(d, lo));
    }
    if (r.hi.is_finite()) {
        const LinearTerm hi = t * bound_value(r.hi);
        out.push_back(r.hi_closed || !positive ? lra::le(d, hi) : lra::lt(d, hi));
    }
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F f)
{
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(threads, n); ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

// ---------------------------------------------------------------- bounds

BoundBundle compute_bounds(std::size_t vars, std::size_t locations, std::size_t edges, std::int64_t rmax,
                           const Rational& T)
{
    BoundBundle b;
    const Rational e = Rational(static_cast<long>(vars)) * Rational(static_cast<long>(rmax)) * T;
    b.E = floor(e);
    b.W = rmax == 0 ? BigInt(0) : ceil(T * Rational(static_cast<long>(rmax + 1)));
    b.L = cnt_star_bound(locations, edges);
    b.K_seg = contraction_bound(vars, b.L);
    const BigInt windows = b.W > 1 ? b.W : BigInt(1);
    b.K = (b.E + windows) * (b.K_seg + 1) + b.E;
    return b;
}

BoundBundle compute_bounds(const Automaton& h, const Rational& T)
{
    return compute_bounds(h.vars.size(), h.locations.size(), h.edges.size() + h.locations.size(), rmax(h), T);
}

// ---------------------------------------------------------------- encoding

Encoding encode_skeleton(const Automaton& h, const std::vector<std::size_t>& edges, const Rational& T,
                         const EncodeOptions& opt)
{
    TimedPath chain;
    for (std::size_t e : edges)
        chain.push_back({Rational(0), {}, e});
    check_chained(h, chain, h.init);

    const std::size_t n = h.vars.size();
    Encoding enc;
    LinearSystem& s = enc.system;
    std::vector<LinearTerm> vals(n, LinearTerm(0));
    auto unit = [&](const std::vector<LinearTerm>& v) {
        if (opt.unit_bound)
            for (const LinearTerm& x : v)
                s.add(lra::le(x, 1));
    };
    s.add_all(guard_constraints(h.locations[h.init].invariant, vals));
    unit(vals);

    LinearTerm total(0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = h.edges[edges[i]];
        const Location& l = h.locations[e.src];
        const Unknown t = s.add_unknown("t" + std::to_string(i + 1));
        enc.delays.push_back(t);
        const LinearTerm tt = LinearTerm::var(t);
        bool open_rate = false;
        for (const Interval& r : l.rates)
            open_rate = open_rate || (!r.is_singular() && (!r.lo_closed || !r.hi_closed));
        const bool instant = opt.instant_location && *opt.instant_location == e.src;
        if (instant)
            s.add(lra::eq(tt, 0));
        else if (opt.strict || open_rate)
            s.add(lra::gt(tt, 0));
        else
            s.add(lra::ge(tt, 0));

        std::vector<LinearTerm> mid = vals;
        enc.displacements.emplace_back(n);
        for (std::size_t x = 0; x < n; ++x) {
            const Interval& r = l.rates[x];
            if (r.is_singular()) {
                mid[x] += tt * bound_value(r.lo);
                continue;
            }
            const Unknown d = s.add_unknown("d" + std::to_string(i + 1) + "_" + h.vars[x]);
            enc.displacements.back()[x] = d;
            std::vector<lra::LinearConstraint> cs;
            rate_constraints(r, LinearTerm::var(d), tt, !instant, cs);
            s.add_all(cs);
            mid[x] += LinearTerm::var(d);
        }
        s.add_all(guard_constraints(l.invariant, mid));
        unit(mid);
        s.add_all(guard_constraints(e.guard, mid));

        enc.reset_values.emplace_back(n);
        for (std::size_t x = 0; x < n; ++x) {
            if (!e.reset[x])
                continue;
            const Interval& r = *e.reset[x];
            if (r.is_singular()) {
                mid[x] = LinearTerm(bound_value(r.lo));
                continue;
            }
            const Unknown u = s.add_unknown("u" + std::to_string(i + 1) + "_" + h.vars[x]);
            enc.reset_values.back()[x] = u;
            std::vector<lra::LinearConstraint> cs;
            interval_constraints(r, LinearTerm::var(u), cs);
            s.add_all(cs);
            mid[x] = LinearTerm::var(u);
        }
        vals = std::move(mid);
        s.add_all(guard_constraints(h.locations[e.trg].invariant, vals));
        unit(vals);
        total += tt;
    }
    s.add(lra::le(total, T));
    return enc;
}

ExtractedPath path_from_witness(const Automaton& h, const std::vector<std::size_t>& edges, const Encoding& enc,
                                const Witness& w)
{
    auto value = [&](Unknown u) {
        auto it = w.find(u);
        return it == w.end() ? Rational(0) : it->second;
    };
    ExtractedPath out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = h.edges[edges[i]];
        const Location& l = h.locations[e.src];
        TimedStep step{value(enc.delays[i]), {}, edges[i]};
        if (!all_singular(l))
            for (std::size_t x = 0; x < h.vars.size(); ++x) {
                const auto& d = enc.displacements[i][x];
                if (!d)
                    step.rates.push_back(bound_value(l.rates[x].lo));
                else if (step.delay > 0)
                    step.rates.push_back(value(*d) / step.delay);
                else
                    step.rates.push_back(some_rate(l.rates[x]));
            }
        out.path.push_back(std::move(step));
        ResetChoices c(h.vars.size());
        for (std::size_t x = 0; x < h.vars.size(); ++x)
            if (const auto& u = enc.reset_values[i][x])
                c[x] = value(*u);
        out.choices.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------- search

std::size_t configured_threads()
{
    if (const char* env = std::getenv("TBREACH_THREADS")) {
        try {
            const unsigned long k = std::stoul(env);
            return k == 0 ? 1 : static_cast<std::size_t>(k);
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

namespace {

struct StepVars {
    Unknown t = 0;
    std::vector<std::optional<Unknown>> d;               // per variable
    std::vector<std::vector<std::optional<Unknown>>> u;  // per original edge of the burst, per variable
};

struct Node {
    std::size_t loc = 0;
    LinearSystem poly;
    std::optional<std::size_t> parent;
    std::size_t edge = 0;
    bool dead = false;
};

// Symbolic states are polyhedra over the normal-form values f, optionally a
// shadow copy h of the input automaton's values (needed when resets are
// nondeterministic, since dreset only over-approximates those), and the
// elapsed time tau.
class Engine {
public:
    Engine(const Automaton& h, std::size_t goal, const Rational& T, const DecideOptions& opt)
        : h_(h), goal_(goal), T_(T), opt_(opt), nz_(normalize_pipeline(h, goal)), hp_(nz_.automaton()),
          n_(h.vars.size())
    {
        for (const Edge& e : h.edges)
            for (const auto& r : e.reset)
                shadow_ = shadow_ || (r && !r->is_singular());
        m_ = (shadow_ ? 2 * n_ : n_) + 1;
    }

    Verdict run()
    {
        Verdict v;
        v.bounds = compute_bounds(hp_, T_);
        v.stats.normalized_locations = hp_.locations.size();
        v.stats.normalized_edges = hp_.edges.size();

        std::vector<bool> goal(hp_.locations.size(), false);
        for (std::size_t l : nz_.goal_set)
            goal[l] = true;
        const std::vector<bool> useful = co_reachable(goal);
        const auto out = hp_.out_edges();
        const std::size_t threads = opt_.threads ? opt_.threads : configured_threads();

        if (hp_.locations[nz_.h3.start].invariant.falsum)
            return v;
        Node root;
        root.loc = nz_.h3.start;
        for (Unknown u = 0; u < m_; ++u) {
            root.poly.declare(u);
            root.poly.add(lra::eq(LinearTerm::var(u), 0));
        }
        nodes_.push_back(std::move(root));
        by_loc_.assign(hp_.locations.size(), {});
        by_loc_[nodes_[0].loc].push_back(0);
        v.stats.nodes = 1;
        if (goal[nodes_[0].loc])
            return finish(v, 0);

        std::vector<std::size_t> frontier{0};
        BigInt depth = 0;
        while (!frontier.empty() && depth < v.bounds.K) {
            ++v.stats.layers;
            depth += 1;
            struct Task {
                std::size_t node;
                std::size_t edge;
            };
            std::vector<Task> tasks;
            for (std::size_t id : frontier) {
                if (nodes_[id].dead)
                    continue;
                ++v.stats.expanded;
                for (std::size_t e : out[nodes_[id].loc])
                    if (useful[hp_.edges[e].trg])
                        tasks.push_back({id, e});
            }
            std::vector<std::optional<LinearSystem>> results(tasks.size());
            parallel_for(tasks.size(), threads,
                         [&](std::size_t k) { results[k] = successor(nodes_[tasks[k].node].poly, tasks[k].edge); });

            std::vector<std::size_t> next;
            for (std::size_t k = 0; k < tasks.size(); ++k) {
                if (!results[k])
                    continue;
                const std::size_t trg = hp_.edges[tasks[k].edge].trg;
                bool covered = false;
                for (std::size_t j : by_loc_[trg])
                    if (!nodes_[j].dead && lra::subset(*results[k], nodes_[j].poly)) {
                        covered = true;
                        break;
                    }
                if (covered) {
                    ++v.stats.subsumed;
                    continue;
                }
                for (std::size_t j : next)
                    if (nodes_[j].loc == trg && !nodes_[j].dead && lra::subset(nodes_[j].poly, *results[k])) {
                        nodes_[j].dead = true;
                        ++v.stats.subsumed;
                    }
                const std::size_t id = nodes_.size();
                nodes_.push_back({trg, std::move(*results[k]), tasks[k].node, tasks[k].edge, false});
                by_loc_[trg].push_back(id);
                next.push_back(id);
                ++v.stats.nodes;
                if (goal[trg])
                    return finish(v, id);
                if (nodes_.size() > opt_.max_nodes)
                    throw ResourceLimit("symbolic search exceeded " + std::to_string(opt_.max_nodes) + " states");
            }
            frontier = std::move(next);
        }
        return v;
    }

private:
    Unknown f(std::size_t x) const { return static_cast<Unknown>(x); }
    Unknown sh(std::size_t x) const { return static_cast<Unknown>(n_ + x); }
    Unknown tau() const { return static_cast<Unknown>(m_ - 1); }
    Unknown post(Unknown u) const { return static_cast<Unknown>(m_ + u); }

    std::vector<bool> co_reachable(const std::vector<bool>& goal) const
    {
        std::vector<bool> r = goal;
        for (bool changed = true; changed;) {
            changed = false;
            for (const Edge& e : hp_.edges)
                if (r[e.trg] && !r[e.src])
                    r[e.src] = changed = true;
        }
        return r;
    }

    // Pre-state unknowns 0..m-1, post-state m..2m-1, step locals above.
    LinearSystem step_system(std::size_t ei, StepVars* vars) const
    {
        const Edge& e = hp_.edges[ei];
        const Location& l = hp_.locations[e.src];
        const bool instant = e.src == nz_.h3.start;
        LinearSystem s;
        for (Unknown u = 0; u < 2 * m_; ++u)
            s.declare(u);
        Unknown next = static_cast<Unknown>(2 * m_);
        auto fresh = [&] {
            s.declare(next);
            return next++;
        };

        StepVars sv;
        sv.t = fresh();
        const LinearTerm t = LinearTerm::var(sv.t);
        s.add(instant ? lra::eq(t, 0) : lra::gt(t, 0));

        std::vector<LinearTerm> disp(n_);
        sv.d.resize(n_);
        for (std::size_t x = 0; x < n_; ++x) {
            const Interval& r = l.rates[x];
            if (r.is_singular()) {
                disp[x] = t * bound_value(r.lo);
                continue;
            }
            const Unknown d = fresh();
            sv.d[x] = d;
            disp[x] = LinearTerm::var(d);
            std::vector<lra::LinearConstraint> cs;
            rate_constraints(r, disp[x], t, !instant, cs);
            s.add_all(cs);
        }

        std::vector<LinearTerm> mid(n_);
        for (std::size_t x = 0; x < n_; ++x)
            mid[x] = LinearTerm::var(f(x)) + disp[x];
        s.add_all(guard_constraints(l.invariant, mid));
        s.add_all(guard_constraints(e.guard, mid));
        std::vector<LinearTerm> after(n_);
        for (std::size_t x = 0; x < n_; ++x) {
            after[x] = LinearTerm::var(post(f(x)));
            s.add(lra::eq(after[x], e.reset[x] ? LinearTerm(0) : mid[x]));
        }
        s.add_all(guard_constraints(hp_.locations[e.trg].invariant, after));
        s.add(lra::eq(LinearTerm::var(post(tau())), LinearTerm::var(tau()) + t));
        s.add(lra::le(LinearTerm::var(post(tau())), T_));

        if (shadow_) {
            std::vector<LinearTerm> cur(n_);
            for (std::size_t x = 0; x < n_; ++x)
                cur[x] = LinearTerm::var(sh(x)) + disp[x];
            s.add_all(guard_constraints(h_.locations[nz_.loc_to_original[e.src]].invariant, cur));
            for (std::size_t oe : nz_.edge_to_original[ei]) {
                const Edge& o = h_.edges[oe];
                s.add_all(guard_constraints(o.guard, cur));
                sv.u.emplace_back(n_);
                for (std::size_t x = 0; x < n_; ++x) {
                    if (!o.reset[x])
                        continue;
                    if (o.reset[x]->is_singular()) {
                        cur[x] = LinearTerm(bound_value(o.reset[x]->lo));
                        continue;
                    }
                    const Unknown u = fresh();
                    sv.u.back()[x] = u;
                    cur[x] = LinearTerm::var(u);
                    std::vector<lra::LinearConstraint> cs;
                    interval_constraints(*o.reset[x], cur[x], cs);
                    s.add_all(cs);
                }
                s.add_all(guard_constraints(h_.locations[o.trg].invariant, cur));
            }
            for (std::size_t x = 0; x < n_; ++x)
                s.add(lra::eq(LinearTerm::var(post(sh(x))), cur[x]));
        }
        if (vars)
            *vars = std::move(sv);
        return s;
    }

    std::optional<LinearSystem> successor(const LinearSystem& pre, std::size_t e) const
    {
        LinearSystem s = step_system(e, nullptr);
        s.add_all(pre.constraints());
        std::vector<Unknown> keep;
        for (Unknown u = 0; u < m_; ++u)
            keep.push_back(post(u));
        const LinearSystem p = lra::project(s, keep);
        std::map<Unknown, Unknown> back;
        LinearSystem out;
        for (Unknown u = 0; u < m_; ++u) {
            back[post(u)] = u;
            out.declare(u);
        }
        for (const auto& c : p.constraints())
            out.add({c.term.rename(back), c.rel});
        if (!lra::is_feasible(out))
            return std::nullopt;
        return lra::remove_redundant(out);
    }

    Verdict finish(Verdict v, std::size_t goal_node)
    {
        v.reachable = true;
        std::vector<std::size_t> chain;
        for (std::optional<std::size_t> k = goal_node; nodes_[*k].parent; k = nodes_[*k].parent)
            chain.push_back(*k);
        std::reverse(chain.begin(), chain.end());

        auto point = lra::feasible(nodes_[goal_node].poly);
        if (!point.sat)
            throw std::logic_error("decide: goal polyhedron is empty");
        Witness state = point.witness;

        struct Concrete {
            std::size_t edge;
            Rational t;
            std::vector<Rational> disp;
            std::vector<ResetChoices> resets;
        };
        std::vector<Concrete> steps(chain.size());
        for (std::size_t k = chain.size(); k-- > 0;) {
            const Node& child = nodes_[chain[k]];
            const Node& parent = nodes_[*child.parent];
            StepVars sv;
            LinearSystem s = step_system(child.edge, &sv);
            s.add_all(parent.poly.constraints());
            for (Unknown u = 0; u < m_; ++u)
                s.add(lra::eq(LinearTerm::var(post(u)), state.at(u)));
            auto fz = lra::feasible(s);
            if (!fz.sat)
                throw std::logic_error("decide: witness back-propagation failed");
            const Location& l = hp_.locations[hp_.edges[child.edge].src];
            Concrete c{child.edge, fz.witness.at(sv.t), {}, {}};
            for (std::size_t x = 0; x < n_; ++x)
                c.disp.push_back(sv.d[x] ? fz.witness.at(*sv.d[x]) : c.t * bound_value(l.rates[x].lo));
            for (const auto& row : sv.u) {
                ResetChoices rc(n_);
                for (std::size_t x = 0; x < n_; ++x)
                    if (row[x])
                        rc[x] = fz.witness.at(*row[x]);
                c.resets.push_back(std::move(rc));
            }
            steps[k] = std::move(c);
            Witness pre;
            for (Unknown u = 0; u < m_; ++u)
                pre[u] = fz.witness.count(u) ? fz.witness.at(u) : Rational(0);
            state = std::move(pre);
        }

        // normal-form run
        TimedPath np;
        for (const Concrete& c : steps) {
            const Location& l = hp_.locations[hp_.edges[c.edge].src];
            TimedStep st{c.t, {}, c.edge};
            if (!all_singular(l))
                for (std::size_t x = 0; x < n_; ++x)
                    st.rates.push_back(c.t > 0 ? c.disp[x] / c.t : some_rate(l.rates[x]));
            np.push_back(std::move(st));
        }
        auto nrun = replay(hp_, initial_state(hp_), np);
        if (!nrun.run)
            throw std::logic_error("decide: normal-form witness does not replay: " + nrun.failure);
        v.normalized_witness = *nrun.run;
        for (const Concrete& c : steps)
            for (const Atom& a : hp_.edges[c.edge].guard.atoms)
                if (a.interval == Interval::point(1)) {
                    ++v.equality_transitions;
                    break;
                }
        const Rational equality_cap = Rational(static_cast<long>(n_)) * Rational(static_cast<long>(rmax(hp_))) * T_;
        if (Rational(static_cast<long>(v.equality_transitions)) > equality_cap)
            throw std::logic_error("decide: witness exceeds the equality-transition bound");

        // lift to the input automaton: wrap-only bursts donate their time to the next edge
        TimedPath path;
        std::vector<ResetChoices> choices;
        Rational carry_t = 0;
        std::vector<Rational> carry_d(n_, Rational(0));
        for (const Concrete& c : steps) {
            carry_t += c.t;
            for (std::size_t x = 0; x < n_; ++x)
                carry_d[x] += c.disp[x];
            const auto& orig = nz_.edge_to_original[c.edge];
            for (std::size_t k = 0; k < orig.size(); ++k) {
                const Location& l = h_.locations[h_.edges[orig[k]].src];
                TimedStep st{k == 0 ? carry_t : Rational(0), {}, orig[k]};
                if (!all_singular(l))
                    for (std::size_t x = 0; x < n_; ++x)
                        st.rates.push_back(k == 0 && carry_t > 0 ? carry_d[x] / carry_t : some_rate(l.rates[x]));
                path.push_back(std::move(st));
                choices.push_back(shadow_ ? c.resets[k] : ResetChoices{});
                if (k == 0) {
                    carry_t = 0;
                    carry_d.assign(n_, Rational(0));
                }
            }
        }
        auto lifted = replay(h_, initial_state(h_), path, choices);
        if (!lifted.run)
            throw std::logic_error("decide: lifted witness does not replay: " + lifted.failure);
        if (lifted.run->final_state().loc != goal_ || lifted.run->duration() > T_)
            throw std::logic_error("decide: lifted witness misses the goal or the bound");
        v.witness = *lifted.run;
        return v;
    }

    const Automaton& h_;
    std::size_t goal_;
    Rational T_;
    DecideOptions opt_;
    Normalized nz_;
    const Automaton& hp_;
    std::size_t n_;
    bool shadow_ = false;
    std::size_t m_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::vector<std::size_t>> by_loc_;
};

} // namespace

Verdict decide_tb_reach(const Automaton& h, std::size_t goal, const Rational& T, const DecideOptions& opt)
{
    h.validate();
    if (goal >= h.locations.size())
        throw ModelError("goal location out of range");
    if (T < 0)
        throw ModelError("time bound must be non-negative");
    const Classification c = classify(h);
    if (!c.diagonal_free)
        throw ClassError("diagonal constraints are outside the decidable class");
    if (!c.non_negative)
        throw ClassError("negative rates are outside the decidable class");
    if (!c.bounded_rates)
        throw ClassError("unbounded rate intervals are outside the decidable class");
    return Engine(h, goal, T, opt).run();
}

} // namespace tbreach
