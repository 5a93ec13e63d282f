#include "support/fixtures.hpp"

#include "tbreach/dsl.hpp"
#include "tbreach/reductions.hpp"
#include "tbreach/semantics.hpp"

#include <doctest.h>

using namespace tbreach;
using fixtures::q;

namespace {

MinskyMachine machine(const std::string& file)
{
    return parse_machine(fixtures::read_file(fixtures::data_path("machines/" + file)));
}

Rational pow_inv(unsigned long base, unsigned long e)
{
    BigInt d;
    mpz_ui_pow_ui(d.get_mpz_t(), base, e);
    return Rational(BigInt(1), d);
}

// Runs the earliest-event simulation until an edge with the given name fires.
Run run_until(const Automaton& h, const State& s0, const std::string& edge, std::size_t max_events = 100)
{
    const std::size_t target = h.edge(edge);
    Simulation sim = simulate(h, s0, max_events, [&](const State&, const std::vector<Candidate>& c) -> std::optional<std::size_t> {
        return 0;
    });
    Run r{s0, {}};
    for (const RunStep& s : sim.run.steps) {
        r.steps.push_back(s);
        if (s.step.edge == target)
            return r;
    }
    FAIL("edge ", edge, " never fired");
    return r;
}

} // namespace

TEST_CASE("machine text format")
{
    const MinskyMachine m = parse_machine("# demo\ncounters a b\nq0: inc a -> q1\nq1: ifz b -> qf else dec -> q1\n");
    CHECK(m.counters == std::vector<std::string>{"a", "b"});
    CHECK(m.states[m.initial] == "q0");
    CHECK(m.states[m.final] == "qf");
    REQUIRE(m.instructions.size() == 2);
    CHECK(m.instructions[1].branching);
    CHECK(m.states[m.instructions[1].next_dec] == "q1");
    CHECK(parse_machine(print_machine(m)) == m);

    for (const std::string& f : fixtures::corpus("machines", ".mm")) {
        const MinskyMachine mm = parse_machine(fixtures::read_file(f));
        CHECK(parse_machine(print_machine(mm)) == mm);
    }

    auto diag = [](const std::string& src) {
        try {
            parse_machine(src);
        } catch (const ParseError& e) {
            REQUIRE(!e.diagnostics.empty());
            return e.diagnostics.front();
        }
        FAIL("accepted: ", src);
        return Diagnostic{};
    };
    Diagnostic d = diag("q0: inc e -> qf\n");
    CHECK(d.line == 1);
    CHECK(d.column == 9);
    d = diag("q0: inc c -> qf\nq1: ifz c -> qf else inc -> q1\n");
    CHECK(d.line == 2);
    CHECK(d.column == 22);
    d = diag("q0: inc c ->\n");
    CHECK(d.line == 1);
    CHECK(d.column == 13);
    d = diag("q0: inc c -> q1\nq0: inc d -> q1\n");
    CHECK(d.line == 2);
    d = diag("q0: inc c -> q0\n");
    CHECK(d.line >= 1);
    CHECK(d.column >= 1);
    d = diag("q0: inc c -> q1 $\n");
    CHECK(d.column == 17);
}

TEST_CASE("run_machine")
{
    MachineTrace t = run_machine(parse_machine("q0: inc c -> qf\n"), 10);
    CHECK(t.accepted);
    CHECK(t.steps() == 1);
    CHECK(t.configs.back().counters[0] == 1);

    t = run_machine(parse_machine("q0: ifz c -> qf else dec -> q0\n"), 10);
    CHECK(t.accepted);
    CHECK(t.ops == std::vector<Op>{Op::Zero});
    CHECK(t.configs.back().counters[0] == 0);

    t = run_machine(machine("diverge.mm"), 50);
    CHECK(!t.accepted);
    CHECK(!t.stuck);
    CHECK(t.steps() == 50);

    t = run_machine(machine("up_down.mm"), 100);
    CHECK(t.accepted);
    CHECK(t.steps() == 7);

    t = run_machine(machine("parity_even.mm"), 100);
    CHECK(!t.accepted);
    CHECK(t.stuck);
    CHECK(run_machine(machine("parity_odd.mm"), 100).accepted);
    CHECK(run_machine(machine("double.mm"), 100).accepted);
    CHECK(run_machine(machine("add.mm"), 100).accepted);
    CHECK(run_machine(machine("transfer.mm"), 100).accepted);
    CHECK(!run_machine(machine("dec_guard.mm"), 100).accepted);
}

TEST_CASE("division gadget divides by k^2 in v(1/k + 1/k^2)")
{
    for (std::int64_t k : {2, 4}) {
        const Automaton h = division_gadget(k);
        for (const char* v : {"1", "1/4", "3/7", "5", "1/1024"}) {
            const Run r = run_until(h, State{h.location("A"), {q(v), 0}}, "done");
            const Rational kk(static_cast<long>(k));
            CHECK(r.final_state().val[0] == q(v) / (kk * kk));
            CHECK(r.final_state().val[1] == 0);
            CHECK(r.duration() == q(v) * (1 / kk + 1 / (kk * kk)));
            CHECK(replay_run(h, r).run);
        }
    }
    const Run r = run_until(division_gadget(2), State{0, {q("1"), 0}}, "done");
    CHECK(r.duration() == q("3/4"));
    CHECK(r.final_state().val[0] == q("1/4"));
}

TEST_CASE("tick gadget fires at 1 - 1/4^i")
{
    const Automaton h = tick_automaton();
    const Simulation sim = simulate(h, initial_state(h), 40);
    Rational t = 0;
    unsigned long i = 0;
    for (const RunStep& s : sim.run.steps) {
        t += s.step.delay;
        if (h.edges[s.step.edge].name == "tick") {
            CHECK(t == 1 - pow_inv(4, i));
            CHECK(s.post.val[0] == pow_inv(4, i));
            ++i;
        }
    }
    CHECK(i >= 12);
}

TEST_CASE("compiled automata fall in the intended classes")
{
    for (const std::string& f : fixtures::corpus("machines", ".mm")) {
        const MinskyMachine m = parse_machine(fixtures::read_file(f));
        const Compiled n = compile_negrates(m);
        Classification c = classify(n.automaton);
        CHECK(c.rectangular);
        CHECK(c.diagonal_free);
        CHECK(c.singular);
        CHECK(!c.non_negative);
        CHECK(parse_model(print_model(n.automaton)) == n.automaton);

        for (std::optional<std::int64_t> k : {std::optional<std::int64_t>{}, std::optional<std::int64_t>{3}}) {
            const Compiled d = compile_diagonal(m, k);
            c = classify(d.automaton);
            CHECK(c.singular);
            CHECK(c.fixed_rate);
            CHECK(!c.diagonal_free);
            for (const Location& l : d.automaton.locations)
                for (const Interval& r : l.rates)
                    CHECK(r.lo.value > 0);
            CHECK(parse_model(print_model(d.automaton)) == d.automaton);
        }
    }
}

TEST_CASE("negative-rate encoding co-simulates the machine corpus")
{
    for (const std::string& f : fixtures::corpus("machines", ".mm")) {
        const MinskyMachine m = parse_machine(fixtures::read_file(f));
        const CosimReport r = cosimulate(m, compile_negrates(m), 12);
        INFO(f, " ", r.failure.value_or(""));
        CHECK(!r.failure);
        CHECK(r.all_pass());
        CHECK(r.goal_reached == r.trace.accepted);
        if (r.goal_reached)
            CHECK(r.goal_time < 1);
        else if (!r.trace.stuck)
            CHECK(r.steps_simulated >= 8);
    }
    const MinskyMachine inc = machine("inc_once.mm");
    const CosimReport r = cosimulate(inc, compile_negrates(inc), 5);
    bool seen = false;
    for (const EncodingCheck& c : r.checks)
        if (c.step == 1 && c.quantity == "x_c") {
            CHECK(c.observed == q("1/16"));
            seen = true;
        }
    CHECK(seen);
    CHECK(r.goal_time == q("3/4"));
}

TEST_CASE("negative-rate zero test and decrement cannot be taken on the wrong value")
{
    // dec_guard: c = 0 at the start, the decrement branch leads to the goal.
    const MinskyMachine m = machine("dec_guard.mm");
    const Compiled c = compile_negrates(m);
    for (const char* branch : {".tick.dec", ".tick.zero"}) {
        const Simulation sim = simulate(c.automaton, initial_state(c.automaton), 200,
                                        [&](const State&, const std::vector<Candidate>& cs) -> std::optional<std::size_t> {
                                            for (std::size_t i = 0; i < cs.size(); ++i)
                                                if (c.automaton.edges[cs[i].edge].name.ends_with(branch))
                                                    return i;
                                            return 0;
                                        });
        bool goal = false;
        for (const RunStep& s : sim.run.steps)
            goal = goal || s.post.loc == c.goal;
        CHECK(!goal);
        if (std::string(branch) == ".tick.dec")
            CHECK(sim.stuck);
    }
    // up_down: at c = 3 the zero branch must get stuck.
    const MinskyMachine u = machine("up_down.mm");
    const Compiled cu = compile_negrates(u);
    std::size_t ticks = 0;
    const Simulation sim = simulate(cu.automaton, initial_state(cu.automaton), 400,
                                    [&](const State&, const std::vector<Candidate>& cs) -> std::optional<std::size_t> {
                                        for (std::size_t i = 0; i < cs.size(); ++i) {
                                            const std::string& n = cu.automaton.edges[cs[i].edge].name;
                                            if (n.find(".tick.") != std::string::npos) {
                                                ++ticks;
                                                if (n == "q3.tick.zero")
                                                    return i;
                                            }
                                        }
                                        return 0;
                                    });
    CHECK(sim.stuck);
    for (const RunStep& s : sim.run.steps)
        CHECK(s.post.loc != cu.goal);
}

TEST_CASE("diagonal rounds: increment halves, maintain restores")
{
    const Automaton h = diagonal_counter_automaton();
    for (unsigned long v = 0; v <= 8; ++v) {
        const Rational x0 = pow_inv(2, v);
        Run r = run_until(h, State{h.location("I1"), {x0, 0, 0, 0}}, "increment");
        CHECK(r.final_state().val == Valuation{x0 / 2, 0, 0, 0});
        CHECK(r.duration() == x0);
        CHECK(r.final_state().loc == h.location("M1"));
        CHECK(replay_run(h, r).run);

        r = run_until(h, State{h.location("M1"), {x0, 0, 0, 0}}, "maintain");
        CHECK(r.final_state().val == Valuation{x0, 0, 0, 0});
        CHECK(r.duration() == 2 * x0);
        for (const RunStep& s : r.steps)
            CHECK(abs(s.post.val[0] - s.post.val[1]) <= 2 * x0);
    }
    // Two increments from v = 3.
    Run r = run_until(h, State{h.location("I1"), {q("1/8"), 0, 0, 0}}, "increment");
    r = run_until(h, State{h.location("I1"), r.final_state().val}, "increment");
    CHECK(r.final_state().val[0] - r.final_state().val[1] == q("1/32"));
}

TEST_CASE("diagonal encoding co-simulates the machine corpus")
{
    for (const std::string& f : fixtures::corpus("machines", ".mm")) {
        const MinskyMachine m = parse_machine(fixtures::read_file(f));
        const MachineTrace t = run_machine(m, 12);
        const std::int64_t k = diagonal_init_rounds(t.steps());
        for (std::optional<std::int64_t> init : {std::optional<std::int64_t>{}, std::optional<std::int64_t>{k}}) {
            const CosimReport r = cosimulate(m, compile_diagonal(m, init), 12);
            INFO(f, " ", r.failure.value_or(""));
            CHECK(!r.failure);
            CHECK(r.all_pass());
            CHECK(r.goal_reached == t.accepted);
            if (r.goal_reached)
                CHECK(r.goal_time <= 3);
        }
    }
}

TEST_CASE("simulation is deterministic")
{
    const MinskyMachine m = machine("transfer.mm");
    const Compiled c = compile_diagonal(m, 3);
    const Simulation a = simulate(c.automaton, initial_state(c.automaton), 500);
    const Simulation b = simulate(c.automaton, initial_state(c.automaton), 500);
    CHECK(a.run == b.run);
    CHECK(replay_run(c.automaton, a.run).run);
}
