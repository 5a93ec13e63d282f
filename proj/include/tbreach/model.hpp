#pragma once

// Structural model of (linear / rectangular) hybrid automata, states and runs.

#include "tbreach/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbreach {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The automaton lies outside the class an algorithm is defined for.
class ClassError : public ModelError {
public:
    using ModelError::ModelError;
};

// ---------------------------------------------------------------- intervals

// Integer endpoint or an infinity.
struct Bound {
    enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

    Kind kind = Kind::Finite;
    std::int64_t value = 0;

    static Bound finite(std::int64_t v) { return {Kind::Finite, v}; }
    static Bound neg_inf() { return {Kind::NegInf, 0}; }
    static Bound pos_inf() { return {Kind::PosInf, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }

    friend bool operator==(const Bound&, const Bound&) = default;
};

// Infinite endpoints are always stored open, so structural equality is semantic
// equality for non-empty intervals.
struct Interval {
    Bound lo = Bound::finite(0);
    Bound hi = Bound::finite(0);
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval point(std::int64_t c) { return {Bound::finite(c), Bound::finite(c), true, true}; }
    static Interval closed(std::int64_t a, std::int64_t b) { return {Bound::finite(a), Bound::finite(b), true, true}; }
    static Interval everything() { return {Bound::neg_inf(), Bound::pos_inf(), false, false}; }
    static Interval at_most(std::int64_t c, bool closed = true) { return {Bound::neg_inf(), Bound::finite(c), false, closed}; }
    static Interval at_least(std::int64_t c, bool closed = true) { return {Bound::finite(c), Bound::pos_inf(), closed, false}; }
    static Interval make(Bound lo, bool lo_closed, Bound hi, bool hi_closed);

    bool is_empty() const;
    bool is_singular() const { return lo.is_finite() && lo == hi && lo_closed && hi_closed; }
    bool is_universal() const { return lo.kind == Bound::Kind::NegInf && hi.kind == Bound::Kind::PosInf; }
    bool contains(const Rational& q) const;
    bool contains(const Interval& other) const;

    friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);

// ---------------------------------------------------------------- guards

enum class Rel : std::uint8_t { Lt, Le, Eq, Ge, Gt };

// Either x in I (rectangular) or x - y REL c (diagonal).
struct Atom {
    enum class Kind : std::uint8_t { Rect, Diag };

    Kind kind = Kind::Rect;
    std::size_t x = 0;
    std::size_t y = 0;
    Interval interval;
    Rel rel = Rel::Le;
    std::int64_t constant = 0;

    static Atom rect(std::size_t x, Interval i) { return {Kind::Rect, x, 0, i, Rel::Le, 0}; }
    static Atom diag(std::size_t x, std::size_t y, Rel rel, std::int64_t c) { return {Kind::Diag, x, y, {}, rel, c}; }

    friend bool operator==(const Atom&, const Atom&) = default;
};

// True, False, or a conjunction of atoms. A Guard with no atoms and !falsum is True.
struct Guard {
    bool falsum = false;
    std::vector<Atom> atoms;

    static Guard top() { return {}; }
    static Guard bottom() { return {true, {}}; }
    static Guard of(std::vector<Atom> atoms) { return {false, std::move(atoms)}; }

    bool is_true() const { return !falsum && atoms.empty(); }
    bool is_false() const { return falsum; }

    friend bool operator==(const Guard&, const Guard&) = default;
};

// Drops duplicate atoms, collapses to False on an empty rectangular atom.
Guard reduce_guard(const Guard& g);
Guard conjoin(const Guard& a, const Guard& b);

// Per-variable reset: nullopt keeps the value, an interval picks a new one.
using Reset = std::vector<std::optional<Interval>>;

// ---------------------------------------------------------------- automata

struct Location {
    std::string name;
    std::vector<Interval> rates;
    Guard invariant;

    friend bool operator==(const Location&, const Location&) = default;
};

struct Edge {
    std::string name;
    std::size_t src = 0;
    std::size_t trg = 0;
    Guard guard;
    Reset reset;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Automaton {
    std::string name;
    std::vector<std::string> vars;
    std::vector<Location> locations;
    std::vector<Edge> edges;
    std::size_t init = 0;

    std::optional<std::size_t> find_location(const std::string& n) const;
    std::optional<std::size_t> find_edge(const std::string& n) const;
    std::optional<std::size_t> find_var(const std::string& n) const;
    std::size_t location(const std::string& n) const; // throws ModelError
    std::size_t edge(const std::string& n) const;     // throws ModelError

    // Outgoing edge indices per location, in edge order.
    std::vector<std::vector<std::size_t>> out_edges() const;

    // Structural sanity (sizes, indices, unique names); throws ModelError.
    void validate() const;

    friend bool operator==(const Automaton&, const Automaton&) = default;
};

struct Classification {
    bool singular = true;
    bool fixed_rate = true;
    bool multirate = false;
    bool non_negative = true;
    bool rectangular = true;
    bool diagonal_free = true;
    bool initialized = true;
    bool deterministic_resets = true;
    bool bounded_rates = true;
};

Classification classify(const Automaton& h);

// Largest absolute finite endpoint over all rate intervals.
std::int64_t rmax(const Automaton& h);
// Largest absolute constant over guards, invariants and reset intervals.
std::int64_t cmax(const Automaton& h);

// ---------------------------------------------------------------- runs

using Valuation = std::vector<Rational>;

struct State {
    std::size_t loc = 0;
    Valuation val;

    friend bool operator==(const State&, const State&) = default;
};

State initial_state(const Automaton& h);

struct TimedStep {
    Rational delay;
    std::vector<Rational> rates; // empty: take the (singular) location rates
    std::size_t edge = 0;

    friend bool operator==(const TimedStep&, const TimedStep&) = default;
};

using TimedPath = std::vector<TimedStep>;

struct RunStep {
    TimedStep step;
    State post;

    friend bool operator==(const RunStep&, const RunStep&) = default;
};

struct Run {
    State initial;
    std::vector<RunStep> steps;

    const State& final_state() const { return steps.empty() ? initial : steps.back().post; }
    Rational duration() const;
    TimedPath path() const;

    friend bool operator==(const Run&, const Run&) = default;
};

} // namespace tbreach
