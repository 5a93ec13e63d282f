#pragma once

// Independent reference procedure: forward symbolic search directly on the
// input automaton (no normalization, no contraction), bounded in depth.

#include "tbreach/model.hpp"

#include <cstddef>
#include <vector>

namespace tbreach {

enum class OracleVerdict { Yes, No, Unknown };

struct OracleOptions {
    std::size_t max_depth = 64;
    std::size_t max_nodes = 20000;
};

struct OracleResult {
    OracleVerdict verdict = OracleVerdict::Unknown;
    std::size_t nodes = 0;
    std::size_t depth = 0; // depth at which the goal was found or the search stopped
};

// Works on any linear automaton with bounded or unbounded rectangular rates,
// diagonal atoms and nondeterministic resets. Unknown when a cap was hit.
OracleResult oracle_tb_reach(const Automaton& h, std::size_t goal, const Rational& T, const OracleOptions& opt = {});
// Reaching any location with goals[l] set.
OracleResult oracle_tb_reach(const Automaton& h, const std::vector<bool>& goals, const Rational& T,
                             const OracleOptions& opt = {});

const char* to_string(OracleVerdict v);

} // namespace tbreach
