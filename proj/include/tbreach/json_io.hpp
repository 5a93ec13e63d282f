#pragma once

// JSON forms of automata, states, timed paths and runs. Rationals are "num/den"
// strings (integers accepted on input), intervals use the DSL syntax.

#include "tbreach/model.hpp"
#include "tbreach/semantics.hpp"

#include <json.hpp>

namespace tbreach {

using Json = nlohmann::ordered_json;

Json to_json(const Automaton& h);
Automaton automaton_from_json(const Json& j);

Json to_json(const Automaton& h, const State& s);
State state_from_json(const Automaton& h, const Json& j);

// [{delay, rates?, edge, resets?}, ...]
struct PathInput {
    TimedPath path;
    std::vector<ResetChoices> choices;
};
Json to_json(const Automaton& h, const TimedPath& p);
PathInput path_from_json(const Automaton& h, const Json& j);

// {initial, steps: [{delay, rates, edge, post_state}], duration}
Json to_json(const Automaton& h, const Run& r);

Rational rational_from_json(const Json& j);

} // namespace tbreach
