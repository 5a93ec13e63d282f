#pragma once

// Exact operational semantics: time steps, edge steps, run replay, effects.

#include "tbreach/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tbreach {

bool eval_atom(const Atom& a, const Valuation& v);
bool eval_guard(const Guard& g, const Valuation& v);

// A step the semantics refuses (violated invariant or guard).
class StepRejected : public std::runtime_error {
public:
    StepRejected(const std::string& what, std::optional<Atom> atom)
        : std::runtime_error(what), atom(std::move(atom)) {}

    std::optional<Atom> atom; // nullopt when the guard/invariant is False
};

// Rates for a step out of `loc`: an empty vector means the singular rates.
// Throws ModelError if a rate is outside its interval or cannot be defaulted.
std::vector<Rational> resolve_rates(const Automaton& h, std::size_t loc, const std::vector<Rational>& rates);

// nu' = nu + r*t; the invariant must hold at both endpoints.
State time_step(const Automaton& h, const State& s, const Rational& t, const std::vector<Rational>& rates);

// Guard check and reset. Nondeterministic resets need a chosen value; for
// deterministic ones `chosen` may be empty. The target invariant is NOT checked.
State edge_step(const Automaton& h, const State& s, std::size_t e,
                const std::vector<std::optional<Rational>>& chosen = {});

using ResetChoices = std::vector<std::optional<Rational>>;

struct ReplayResult {
    std::optional<Run> run;
    std::size_t failed_step = 0; // index of the offending step when !run
    std::string failure;
};

// Replays a path from s0, checking invariants on arrival (including s0 and the
// final state). `choices[i]` supplies values for nondeterministic resets of step i.
ReplayResult replay(const Automaton& h, const State& s0, const TimedPath& path,
                    const std::vector<ResetChoices>& choices = {});

// Replays a run's own path from its initial state, taking nondeterministic
// reset values from its post-states; succeeds iff the run is genuine.
ReplayResult replay_run(const Automaton& h, const Run& r);

// Deterministic-reset replay; nullopt (bottom) on any violation.
std::optional<Run> run_of(const Automaton& h, const State& s0, const TimedPath& path);

Rational duration(const TimedPath& path);
// Sum of rate(x) * delay over the steps.
Rational effect(const Automaton& h, const TimedPath& path, std::size_t x);

// Throws ModelError unless consecutive edges chain (trg(e_i) == src(e_{i+1})).
void check_chained(const Automaton& h, const TimedPath& path, std::optional<std::size_t> start = std::nullopt);

} // namespace tbreach
