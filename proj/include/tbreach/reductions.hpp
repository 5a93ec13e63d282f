#pragma once

// Two-counter machines, their interpreter, and the two compilations into hybrid
// automata (negative rates; diagonal guards) with an earliest-event simulator and
// a co-simulator that checks the counter encodings exactly.

#include "tbreach/model.hpp"
#include "tbreach/semantics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tbreach {

// ---------------------------------------------------------------- machines

enum class Op : std::uint8_t { Inc, Zero, Dec };

std::string to_string(Op op);

// One instruction per state: `q: inc c -> q'` or `q: ifz c -> q' else dec -> q''`.
struct Instruction {
    std::size_t src = 0;
    bool branching = false;      // ifz form
    std::size_t counter = 0;
    std::size_t next = 0;        // target of inc, or of the zero branch
    std::size_t next_dec = 0;    // target of the dec branch

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct MinskyMachine {
    std::vector<std::string> states;
    std::vector<std::string> counters; // exactly two
    std::size_t initial = 0;
    std::size_t final = 0;
    std::vector<Instruction> instructions;

    std::optional<std::size_t> find_state(std::string_view n) const;
    const Instruction* instruction(std::size_t q) const;

    friend bool operator==(const MinskyMachine&, const MinskyMachine&) = default;
};

// Line format, `#` comments:
//   counters c d      (default c d)
//   init q0           (default: source of the first instruction)
//   final qf          (default: the only state without an instruction)
//   q0: inc c -> q1
//   q1: ifz c -> qf else dec -> q1
// Throws ParseError with positioned diagnostics.
MinskyMachine parse_machine(std::string_view src);
std::string print_machine(const MinskyMachine& m);

struct MachineConfig {
    std::size_t state = 0;
    std::vector<std::int64_t> counters;

    friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

struct MachineTrace {
    std::vector<MachineConfig> configs; // configs[0] is (initial, 0, 0)
    std::vector<Op> ops;                // ops[i] leads from configs[i] to configs[i+1]
    std::vector<std::size_t> op_counter;
    bool accepted = false;
    bool stuck = false;                 // non-final state without instruction

    std::size_t steps() const { return ops.size(); }
};

MachineTrace run_machine(const MinskyMachine& m, std::size_t max_steps);

// ---------------------------------------------------------------- compilation

enum class Target : std::uint8_t { NegRates, Diagonal };

std::string to_string(Target t);
std::optional<Target> parse_target(std::string_view s);

struct Compiled {
    Automaton automaton;
    Target target = Target::NegRates;
    std::size_t goal = 0;
    std::optional<std::int64_t> init_rounds; // diagonal: fixed initialization, nullopt for the guessing loop
    Rational budget;                         // time within which accepting machines reach the goal
};

// Singular RHA with negative rates: tick gadget on (xt, yt) and per-counter
// division gadgets on (x_c, y_c) in product with the machine states.
Compiled compile_negrates(const MinskyMachine& m);

// Fixed-rate LHA with diagonal guards: each counter c is c_top - c_bot, each
// auxiliary counter a is encoded by x_a - y_a = 1/2^v(a) at round starts.
Compiled compile_diagonal(const MinskyMachine& m, std::optional<std::int64_t> init_rounds = std::nullopt);

// Rounds of initialization sufficient for m machine steps: ceil(log2(m) + 1).
std::int64_t diagonal_init_rounds(std::size_t m);

// A single auxiliary counter: variables x, y, z, w with rates 1, 1, 2, 3 and
// locations M1, M2 (maintain) and I1, I2 (increment); the round-closing edges
// are named "maintain" and "increment".
Automaton diagonal_counter_automaton();

// Division of x by k^2 via the internal y, entering at location A; the exit
// edge is named "done" and leads to location D.
Automaton division_gadget(std::int64_t k);

// Tick generator alone: ticks (edges named "tick") at 1 - 1/4^i.
Automaton tick_automaton();

// ---------------------------------------------------------------- simulation

struct Candidate {
    std::size_t edge = 0;
    Rational delay;
};

// Edges that can be taken after the least possible delay from s (singular
// rates, deterministic resets), in edge order; the target invariant must hold.
std::vector<Candidate> earliest_candidates(const Automaton& h, const State& s);

// Picks one of the candidates (index); nullopt stops the simulation.
using Chooser = std::function<std::optional<std::size_t>(const State&, const std::vector<Candidate>&)>;

struct Simulation {
    Run run;
    bool stuck = false; // no candidate left
};

Simulation simulate(const Automaton& h, const State& s0, std::size_t max_events, const Chooser& choose = {});

// ---------------------------------------------------------------- co-simulation

struct EncodingCheck {
    std::size_t step = 0;  // machine step (tick index / round boundary)
    std::string quantity;  // variable or derived quantity
    Rational expected;
    Rational observed;
    bool pass = false;
};

struct CosimReport {
    Target target = Target::NegRates;
    MachineTrace trace;
    std::vector<EncodingCheck> checks;
    std::size_t steps_simulated = 0;
    bool goal_reached = false;
    Rational goal_time;
    Rational budget;
    std::optional<std::string> failure;
    std::size_t events = 0;

    bool all_pass() const;
};

// Drives the compiled automaton along the canonical run for up to n_steps
// machine steps and compares the encoding at every tick / round boundary.
CosimReport cosimulate(const MinskyMachine& m, const Compiled& c, std::size_t n_steps,
                       std::size_t max_events = 2000000);

} // namespace tbreach
