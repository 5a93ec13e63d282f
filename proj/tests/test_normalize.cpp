#include "support/fixtures.hpp"

#include "tbreach/format.hpp"
#include "tbreach/normalize.hpp"
#include "tbreach/semantics.hpp"

#include <doctest.h>

using namespace tbreach;
using fixtures::q;

namespace {

Guard g1(std::size_t x, Interval i) { return Guard::of({Atom::rect(x, i)}); }

const Edge* edge_named_prefix(const Automaton& h, const std::string& prefix)
{
    for (const Edge& e : h.edges)
        if (e.name.rfind(prefix, 0) == 0)
            return &e;
    return nullptr;
}

} // namespace

TEST_CASE("interval difference")
{
    CHECK(interval_difference(Interval::closed(2, 3), Interval::point(1)) == Interval::closed(1, 2));
    CHECK(interval_difference(Interval::closed(2, 3), Interval::closed(0, 1)) == Interval::closed(1, 3));
    const Interval open = interval_difference(Interval::make(Bound::finite(2), false, Bound::finite(3), true),
                                              Interval::closed(0, 1));
    CHECK(open == Interval::make(Bound::finite(1), false, Bound::finite(3), true));
    CHECK(interval_difference(Interval::at_most(4), Interval::point(1)) == Interval::at_most(3));
}

TEST_CASE("adapt_reset")
{
    CHECK(adapt_reset(g1(0, Interval::closed(2, 3)), {Interval::point(1)}) == g1(0, Interval::closed(1, 2)));
    CHECK(adapt_reset(g1(0, Interval::closed(2, 3)), {Interval::closed(0, 1)}) == g1(0, Interval::closed(1, 3)));
    const Guard g = Guard::of({Atom::rect(0, Interval::at_most(1)), Atom::rect(1, Interval::point(2))});
    CHECK(adapt_reset(g, {Interval::point(0), Interval::point(0)}) == g);
    CHECK_THROWS_AS(adapt_reset(Guard::of({Atom::diag(0, 1, Rel::Le, 0)}), {Interval::point(0), Interval::point(0)}),
                    ModelError);
}

TEST_CASE("adapt_int case tables")
{
    CHECK(adapt_int(g1(0, Interval::at_most(2)), {2}) == g1(0, Interval::point(0)));
    CHECK(adapt_int(g1(0, Interval::at_least(3)), {2}) == g1(0, Interval::point(1)));
    CHECK(adapt_int(g1(0, Interval::at_most(5, false)), {2}).is_true());

    CHECK(adapt_int(g1(0, Interval::at_most(1)), {2}).is_false());
    CHECK(adapt_int(g1(0, Interval::at_most(3)), {2}).is_true());
    CHECK(adapt_int(g1(0, Interval::at_most(2, false)), {2}).is_false());
    CHECK(adapt_int(g1(0, Interval::at_most(3, false)), {2}) == g1(0, Interval::at_most(1, false)));
    CHECK(adapt_int(g1(0, Interval::point(2)), {2}) == g1(0, Interval::point(0)));
    CHECK(adapt_int(g1(0, Interval::point(3)), {2}).is_false());
    CHECK(adapt_int(g1(0, Interval::at_least(4)), {2}).is_false());
    CHECK(adapt_int(g1(0, Interval::at_least(2)), {2}).is_true());
    CHECK(adapt_int(g1(0, Interval::at_least(1, false)), {2}).is_true());
    CHECK(adapt_int(g1(0, Interval::at_least(2, false)), {2}) == g1(0, Interval::at_least(0, false)));
    CHECK(adapt_int(g1(0, Interval::at_least(3, false)), {2}).is_false());

    CHECK_THROWS_AS(adapt_int(g1(0, Interval::closed(1, 2)), {0}), ModelError);
    CHECK(split_guard(g1(0, Interval::closed(1, 2))).atoms.size() == 2);
}

TEST_CASE("dreset makes resets deterministic and shifts guards")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 1; }
        loc b { rate x = 0; }
        edge go: a -> b { reset x := [1, 2]; }
        edge done: b -> b { guard x == 2; }
    )");
    const DresetResult r = dreset(h);
    for (const Edge& e : r.automaton.edges)
        for (const auto& reset : e.reset)
            if (reset)
                CHECK(*reset == Interval::point(0));
    const Edge* done = edge_named_prefix(r.automaton, "done");
    REQUIRE(done);
    CHECK(r.contexts[done->src][0] == Interval::closed(1, 2));
    CHECK(done->guard == g1(0, Interval::closed(0, 1)));
    CHECK(r.loc_map[done->src] == h.location("b"));
}

TEST_CASE("dreset on deterministic zero resets is isomorphic")
{
    const Automaton h = fixtures::fig1();
    const DresetResult r = dreset(h);
    CHECK(r.automaton.locations.size() == h.locations.size());
    CHECK(r.automaton.edges.size() == h.edges.size());
    for (std::size_t l = 0; l < r.automaton.locations.size(); ++l)
        CHECK(r.automaton.locations[l].invariant == h.locations[r.loc_map[l]].invariant);
}

TEST_CASE("cbound wraps integer parts")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 1; }
        loc b { rate x = 0; }
        edge go: a -> b { guard x == 2; }
    )");
    const CboundResult r = cbound(h);
    CHECK(r.cmax == 2);
    const Automaton& c = r.automaton;
    const Edge* go = edge_named_prefix(c, "go");
    REQUIRE(go);
    CHECK(r.parts[go->src] == IntegerPart{2});
    CHECK(go->guard == g1(0, Interval::point(0)));

    // duration 2 in H: wrap at time 1 and 2, then the adapted edge
    TimedPath p;
    std::size_t loc = c.init;
    for (int k = 0; k < 2; ++k) {
        const Edge* w = nullptr;
        for (const Edge& e : c.edges)
            if (e.src == loc && e.name.find(".w_x") != std::string::npos)
                w = &e;
        REQUIRE(w);
        p.push_back({q("1"), {}, c.edge(w->name)});
        loc = w->trg;
    }
    p.push_back({q("0"), {}, c.edge(go->name)});
    auto run = run_of(c, initial_state(c), p);
    REQUIRE(run);
    CHECK(run->duration() == q("2"));
    for (const RunStep& s : run->steps)
        CHECK(s.post.val[0] <= 1);
    CHECK(r.loc_map[run->final_state().loc] == h.location("b"));
}

TEST_CASE("cbound with cmax 0 saturates immediately")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 1; }
    )");
    const CboundResult r = cbound(h);
    CHECK(r.cmax == 0);
    for (const IntegerPart& i : r.parts)
        CHECK(i[0] <= 1);
    CHECK(r.automaton.locations.size() == 2);
}

TEST_CASE("cbound preconditions")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = -1; }
    )");
    CHECK_THROWS_AS(cbound(h), ModelError);
}

TEST_CASE("strict compresses zero-time paths")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x, y;
        init a;
        loc a { rate x = 1; rate y = 1; inv x <= 1; }
        loc b { rate x = 1; rate y = 1; }
        loc c { rate x = 0; rate y = 0; }
        edge ab: a -> b { reset y := 0; }
        edge bc: b -> c { guard x == 1; reset x := 0; }
    )");
    const StrictResult r = strict(h);
    bool found = false;
    for (std::size_t e = 0; e < r.automaton.edges.size(); ++e) {
        const auto& burst = r.bursts[e];
        if (burst.size() == 2 && r.automaton.edges[e].src != r.start) {
            found = true;
            const Edge& out = r.automaton.edges[e];
            CHECK(out.guard == g1(0, Interval::point(1)));
            CHECK(out.reset[0].has_value());
            CHECK(out.reset[1].has_value());
        }
    }
    CHECK(found);
}

TEST_CASE("strict on an acyclic automaton mirrors single edges")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 1; }
        loc b { rate x = 1; }
        edge ab: a -> b { guard x == 1; reset x := 0; }
    )");
    const StrictResult r = strict(h);
    std::size_t singles = 0;
    for (std::size_t e = 0; e < r.automaton.edges.size(); ++e)
        if (r.automaton.edges[e].src != r.start) {
            CHECK(r.bursts[e].size() == 1);
            ++singles;
        }
    CHECK(singles == 1);
}

TEST_CASE("pipeline on fig1 satisfies H1-H3")
{
    const Automaton h = fixtures::fig1();
    const Normalized n = normalize_pipeline(h, h.location("l4"));
    CHECK(check_h123(n.automaton()).empty());
    CHECK_FALSE(n.goal_set.empty());
    for (std::size_t l : n.goal_set)
        CHECK(n.loc_to_original[l] == h.location("l4"));
    for (const Edge& e : n.automaton().edges)
        for (const Atom& a : e.guard.atoms)
            CHECK(a.interval == Interval::point(1));

    const Normalized again = normalize_pipeline(n.automaton(), n.goal_set.front());
    CHECK(check_h123(again.automaton()).empty());
}

TEST_CASE("pipeline rejects diagonal constraints")
{
    const Automaton h = parse_model(R"(
        automaton t;
        var x, y;
        init a;
        loc a { rate x = 1; rate y = 1; }
        edge e: a -> a { guard x - y <= 0; }
    )");
    CHECK_THROWS_AS(normalize_pipeline(h, 0), ClassError);
}
