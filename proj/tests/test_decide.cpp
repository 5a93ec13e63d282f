#include "support/fixtures.hpp"

#include "tbreach/decide.hpp"
#include "tbreach/oracle.hpp"

#include <doctest.h>

using namespace tbreach;
using fixtures::q;

namespace {

Automaton without_edge(const Automaton& h, const std::string& name)
{
    Automaton out = h;
    out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(h.edge(name)));
    return out;
}

void check_witness(const Automaton& h, std::size_t goal, const Rational& T, const Verdict& v)
{
    REQUIRE(v.reachable);
    REQUIRE(v.witness);
    auto replayed = replay_run(h, *v.witness);
    REQUIRE(replayed.run);
    CHECK(replayed.run->final_state().loc == goal);
    CHECK(v.witness->duration() <= T);
}

} // namespace

TEST_CASE("bounds")
{
    const BoundBundle b = compute_bounds(2, 5, 7, 17, q("1"));
    CHECK(b.E == 34);
    CHECK(b.W == 18);
    CHECK(b.L == 1285);
    CHECK(b.K_seg == 6429);
    CHECK(b.K == BigInt(52) * 6430 + 34);

    const BoundBundle z = compute_bounds(2, 5, 7, 17, q("0"));
    CHECK(z.E == 0);
    CHECK(z.W == 0);
    CHECK(z.K == z.K_seg + 1);

    const BoundBundle still = compute_bounds(2, 5, 7, 0, q("3"));
    CHECK(still.E == 0);
    CHECK(still.W == 0);
}

TEST_CASE("encode_skeleton")
{
    const Automaton h = fixtures::fig1();
    const std::vector<std::size_t> reference{h.edge("e01"), h.edge("e10"), h.edge("e03"), h.edge("e34")};
    // the cited delays do not satisfy e03's guard; no delays do
    CHECK_FALSE(lra::is_feasible(encode_skeleton(h, reference, q("1")).system));

    const std::vector<std::size_t> two_loops{h.edge("e01"), h.edge("e10"), h.edge("e01"), h.edge("e10"),
                                             h.edge("e03"), h.edge("e34")};
    const Encoding enc = encode_skeleton(h, two_loops, q("1"));
    auto fz = lra::feasible(enc.system);
    REQUIRE(fz.sat);
    const ExtractedPath p = path_from_witness(h, two_loops, enc, fz.witness);
    auto run = run_of(h, initial_state(h), p.path);
    REQUIRE(run);
    CHECK(run->final_state().loc == h.location("l4"));

    const Automaton stuck = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 0; }
        loc b { rate x = 0; }
        edge go: a -> b { guard x == 1; }
    )");
    CHECK_FALSE(lra::is_feasible(encode_skeleton(stuck, {0}, q("5")).system));
    CHECK(lra::is_feasible(encode_skeleton(stuck, {}, q("0")).system));
}

TEST_CASE("fig1 at T = 1 is reachable")
{
    const Automaton h = fixtures::fig1();
    const std::size_t goal = h.location("l4");
    const Verdict v = decide_tb_reach(h, goal, q("1"));
    check_witness(h, goal, q("1"), v);
    CHECK(v.witness->duration() == q("5347/6250"));
    CHECK(v.witness->final_state().val == Valuation{q("0"), q("6179/6250")});
}

TEST_CASE("fig1 negative controls")
{
    const Automaton h = fixtures::fig1();
    CHECK_FALSE(decide_tb_reach(without_edge(h, "e01"), h.location("l4"), q("1")).reachable);
    CHECK_FALSE(decide_tb_reach(h, h.location("l4"), q("139/250")).reachable);
    const Verdict v = decide_tb_reach(h, h.location("l0"), q("0"));
    CHECK(v.reachable);
    CHECK(v.witness->steps.empty());
}

TEST_CASE("oracle agrees on fig1")
{
    const Automaton h = fixtures::fig1();
    CHECK(oracle_tb_reach(h, h.location("l4"), q("1")).verdict == OracleVerdict::Yes);
    CHECK(oracle_tb_reach(h, h.location("l4"), q("139/250")).verdict == OracleVerdict::No);
    CHECK(oracle_tb_reach(without_edge(h, "e01"), h.location("l4"), q("1")).verdict == OracleVerdict::No);
}

TEST_CASE("nondeterministic resets are decided exactly")
{
    // dreset alone would let b reach c: x == 0 then x == 2 after one reset into [0, 2]
    const Automaton h = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = 0; }
        loc b { rate x = 0; }
        loc c { rate x = 0; }
        edge go: a -> b { reset x := [0, 2]; }
        edge z: b -> b { guard x == 0; }
        edge two: b -> c { guard x == 2; }
        edge fin: c -> c { guard x == 0; }
    )");
    CHECK(decide_tb_reach(h, h.location("c"), q("1")).reachable);
    Automaton g = h;
    g.locations.push_back({"d", {Interval::point(0)}, Guard::top()});
    g.locations.push_back({"e", {Interval::point(0)}, Guard::top()});
    g.edges.push_back({"zd", h.location("b"), 3, Guard::of({Atom::rect(0, Interval::point(0))}), {std::nullopt}});
    g.edges.push_back({"td", 3, 4, Guard::of({Atom::rect(0, Interval::point(2))}), {std::nullopt}});
    g.validate();
    CHECK(oracle_tb_reach(g, 4, q("1")).verdict == OracleVerdict::No);
    CHECK_FALSE(decide_tb_reach(g, 4, q("1")).reachable);
    CHECK(decide_tb_reach(g, 3, q("1")).reachable);
}

TEST_CASE("class rejection")
{
    const Automaton neg = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x = -1; }
    )");
    CHECK_THROWS_AS(decide_tb_reach(neg, 0, q("1")), ClassError);
    const Automaton unbounded = parse_model(R"(
        automaton t;
        var x;
        init a;
        loc a { rate x in [0, inf); }
    )");
    CHECK_THROWS_AS(decide_tb_reach(unbounded, 0, q("1")), ClassError);
}
