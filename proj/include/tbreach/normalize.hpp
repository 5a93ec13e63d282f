#pragma once

// Normal form for time-bounded reachability: deterministic resets (dreset),
// variables bounded by 1 (cbound) and strictly elapsing time (strict), each
// with back-maps to the automaton it was built from.

#include "tbreach/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tbreach {

// I - J = { x | exists y in I, z in J: x + z = y }.
Interval interval_difference(const Interval& i, const Interval& j);

// Per-variable interval in which the variable was last reset.
using ResetContext = std::vector<Interval>;

// Every rectangular atom x in I becomes x in I - rho(x). Throws ModelError on diagonals.
Guard adapt_reset(const Guard& g, const ResetContext& rho);

// Compound rectangular atoms split into one-sided atoms (x >= a, x <= b) or x = k.
Guard split_guard(const Guard& g);

// Per-variable integer part.
using IntegerPart = std::vector<std::int64_t>;

// Integer-part adaptation of one-sided / equality atoms; throws ModelError on
// compound intervals and diagonals.
Guard adapt_int(const Guard& g, const IntegerPart& i);

struct DresetResult {
    Automaton automaton;
    std::vector<std::size_t> loc_map;     // output location -> input location
    std::vector<ResetContext> contexts;   // output location -> rho
    std::vector<std::size_t> edge_map;    // output edge -> input edge
};

DresetResult dreset(const Automaton& h);

struct CboundResult {
    Automaton automaton;
    std::int64_t cmax = 0;                           // integer parts range over 0..cmax+1
    std::vector<std::size_t> loc_map;                // output location -> input location
    std::vector<IntegerPart> parts;                  // output location -> i
    std::vector<std::optional<std::size_t>> edge_map; // output edge -> input edge; nullopt for a wrap
    std::vector<std::optional<std::size_t>> wrap_var; // output edge -> wrapped variable
};

CboundResult cbound(const Automaton& h);

enum class Status : std::uint8_t { Zero, Positive, Unknown };

struct StrictResult {
    Automaton automaton;
    std::size_t start = 0;                            // synthetic initial location
    std::vector<std::size_t> loc_map;                 // output location -> input location
    std::vector<std::vector<Status>> status;          // output location -> arrival status
    std::vector<std::vector<std::size_t>> bursts;     // output edge -> input edges
};

// Folded over the edges of each burst. Partial bursts in the same location
// with the same static knowledge and observer state are merged; nullopt
// discards the burst.
class BurstObserver {
public:
    virtual ~BurstObserver() = default;
    virtual std::size_t initial() = 0;
    virtual std::optional<std::size_t> step(std::size_t state, std::size_t edge) = 0;
};

StrictResult strict(const Automaton& h, BurstObserver* observer = nullptr);

struct Normalized {
    DresetResult h1;
    CboundResult h2;
    StrictResult h3;
    std::vector<std::size_t> goal_set;                // locations of h3 mapping to the goal
    std::vector<std::size_t> loc_to_original;         // h3 location -> input location
    std::vector<std::vector<std::size_t>> edge_to_original; // h3 edge -> input edges

    const Automaton& automaton() const { return h3.automaton; }
};

// strict(cbound(dreset(H))); throws ClassError on diagonal atoms or negative rates.
Normalized normalize_pipeline(const Automaton& h, std::size_t goal);

// Violations of H1 (singular, non-negative rates), H2 (deterministic resets to 0)
// and H3 (guards True or x=1 atoms, tested variables reset); empty when compliant.
std::vector<std::string> check_h123(const Automaton& h);

} // namespace tbreach
