#pragma once

// Time-bounded reachability for rectangular automata with non-negative rates:
// symbolic search over the normal form, witness extraction and lift-back.

#include "tbreach/constraints.hpp"
#include "tbreach/lra.hpp"
#include "tbreach/model.hpp"
#include "tbreach/normalize.hpp"
#include "tbreach/semantics.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace tbreach {

struct BoundBundle {
    BigInt E;     // equality-guarded transitions: floor(|X| * rmax * T)
    BigInt W;     // time windows of length 1/(rmax+1): ceil(T * (rmax+1)), 0 when rmax = 0
    BigInt L;     // Cnt* length bound
    BigInt K_seg; // contracted equality-free segment length bound
    BigInt K;     // witness length cap: (E + max(W,1)) * (K_seg + 1) + E
};

BoundBundle compute_bounds(std::size_t vars, std::size_t locations, std::size_t edges, std::int64_t rmax,
                           const Rational& T);
// Bounds for a normal-form automaton; one idle self-loop per location is counted.
BoundBundle compute_bounds(const Automaton& h, const Rational& T);

// ---------------------------------------------------------------- encoding

struct EncodeOptions {
    bool strict = false;                         // delays > 0
    bool unit_bound = false;                     // every sampled value <= 1
    std::optional<std::size_t> instant_location; // delays out of this location are 0
};

struct Encoding {
    lra::LinearSystem system;
    std::vector<lra::Unknown> delays;
    std::vector<std::vector<std::optional<lra::Unknown>>> displacements; // per step, per non-singular variable
    std::vector<std::vector<std::optional<lra::Unknown>>> reset_values;  // per step, per nondeterministic reset
};

// Runs along `edges` from (Init, 0) of total duration <= T.
Encoding encode_skeleton(const Automaton& h, const std::vector<std::size_t>& edges, const Rational& T,
                         const EncodeOptions& opt = {});

struct ExtractedPath {
    TimedPath path;
    std::vector<ResetChoices> choices;
};

ExtractedPath path_from_witness(const Automaton& h, const std::vector<std::size_t>& edges, const Encoding& enc,
                                const lra::Witness& w);

// ---------------------------------------------------------------- decision

class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecideOptions {
    std::size_t threads = 0;       // 0: TBREACH_THREADS, or 1 when unset
    std::size_t max_nodes = 200000; // symbolic states before giving up
};

struct DecideStats {
    std::size_t nodes = 0;
    std::size_t expanded = 0;
    std::size_t subsumed = 0;
    std::size_t layers = 0;
    std::size_t normalized_locations = 0;
    std::size_t normalized_edges = 0;
};

struct Verdict {
    bool reachable = false;
    std::optional<Run> witness;               // run of the input automaton
    std::optional<Run> normalized_witness;    // the same run in the normal form
    std::size_t equality_transitions = 0;     // of the normalized witness
    BoundBundle bounds;
    DecideStats stats;
};

// Throws ClassError for diagonal atoms, negative or unbounded rates;
// ResourceLimit when max_nodes is exceeded.
Verdict decide_tb_reach(const Automaton& h, std::size_t goal, const Rational& T, const DecideOptions& opt = {});

// Worker threads for parallel expansion: TBREACH_THREADS, default 1.
std::size_t configured_threads();

} // namespace tbreach
