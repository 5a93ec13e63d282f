#pragma once

// Syntactic contraction of timed paths: repeated simple cycles are merged
// step-wise, keeping duration, per-variable effect and the timing of the
// first/last reset of every variable.

#include "tbreach/model.hpp"

#include <optional>
#include <vector>

namespace tbreach {

// Positions (0-based, inclusive) of two equal occurrences e_j..e_k = e_j2..e_k2
// of a simple cycle with k < j2.
struct CycleRepeat {
    std::size_t j = 0, k = 0, j2 = 0, k2 = 0;

    friend bool operator==(const CycleRepeat&, const CycleRepeat&) = default;
};

// Lexicographically least (j, k, j2, k2), edges compared by identity.
std::optional<CycleRepeat> find_cycle_repeat(const Automaton& h, const std::vector<std::size_t>& edges);

// True iff e_j..e_k is a simple cycle: chained, closed, no source repeated.
bool is_simple_cycle(const Automaton& h, const std::vector<std::size_t>& edges, std::size_t j, std::size_t k);

// One contraction step; the identity when no cycle repeats. Steps with
// explicit rates are merged with the time-weighted average rate.
TimedPath cnt(const Automaton& h, const TimedPath& path);

// S_x for every variable x: first and last resetting position (0, 1 or 2 entries).
struct ResetLandmarks {
    std::vector<std::vector<std::size_t>> per_var;

    std::vector<std::size_t> all() const; // sorted union
};

ResetLandmarks reset_landmarks(const Automaton& h, const TimedPath& path);

struct ContractionReport {
    std::size_t input_length = 0;
    std::size_t output_length = 0;
    std::size_t iterations = 0;                // applications of Cnt that changed the path
    std::vector<CycleRepeat> repeats;          // positions used, per iteration
    std::vector<std::size_t> landmarks;        // contraction only: positions in the input
    std::vector<std::size_t> output_landmarks; // the same steps in the output
    BigInt cnt_star_bound;                     // L = |Loc| * (2^(|Edges|+1) + 1)
    BigInt contraction_bound;                  // K_seg = 2|X| + (2|X|+1) * L
};

struct Contracted {
    TimedPath path;
    ContractionReport report;
};

Contracted cnt_star(const Automaton& h, const TimedPath& path);
Contracted contraction(const Automaton& h, const TimedPath& path);

BigInt cnt_star_bound(std::size_t locations, std::size_t edges);
BigInt contraction_bound(std::size_t vars, const BigInt& cnt_star_len);

} // namespace tbreach
