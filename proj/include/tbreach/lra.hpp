#pragma once

// Exact linear real arithmetic over the rationals: Gaussian substitution for
// equalities, Fourier-Motzkin for (strict and non-strict) inequalities,
// witnesses by back-substitution.

#include "tbreach/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tbreach::lra {

using Unknown = std::uint32_t;
using Witness = std::map<Unknown, Rational>;

// sum a_i * u_i + c, coefficients sorted by unknown and non-zero.
class LinearTerm {
public:
    LinearTerm() = default;
    LinearTerm(const Rational& c) : constant_(c) {} // NOLINT: constants convert implicitly
    LinearTerm(long c) : constant_(c) {}           // NOLINT

    static LinearTerm var(Unknown u, const Rational& a = 1);

    const std::vector<std::pair<Unknown, Rational>>& coeffs() const { return coeffs_; }
    const Rational& constant() const { return constant_; }
    Rational coeff(Unknown u) const;
    bool is_constant() const { return coeffs_.empty(); }

    LinearTerm& operator+=(const LinearTerm& o);
    LinearTerm& operator-=(const LinearTerm& o);
    LinearTerm& operator*=(const Rational& k);
    friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
    friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }
    friend LinearTerm operator*(LinearTerm a, const Rational& k) { return a *= k; }
    friend LinearTerm operator*(const Rational& k, LinearTerm a) { return a *= k; }
    LinearTerm operator-() const { return *this * Rational(-1); }

    // Replaces u by `by`.
    LinearTerm substitute(Unknown u, const LinearTerm& by) const;
    LinearTerm rename(const std::map<Unknown, Unknown>& m) const;
    // Unassigned unknowns evaluate to 0.
    Rational eval(const Witness& w) const;

    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;

private:
    std::vector<std::pair<Unknown, Rational>> coeffs_;
    Rational constant_ = 0;
};

// term REL 0
enum class Relation : std::uint8_t { Lt, Le, Eq };

struct LinearConstraint {
    LinearTerm term;
    Relation rel = Relation::Le;

    bool holds(const Witness& w) const;
    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

inline LinearConstraint lt(const LinearTerm& a, const LinearTerm& b) { return {a - b, Relation::Lt}; }
inline LinearConstraint le(const LinearTerm& a, const LinearTerm& b) { return {a - b, Relation::Le}; }
inline LinearConstraint eq(const LinearTerm& a, const LinearTerm& b) { return {a - b, Relation::Eq}; }
inline LinearConstraint ge(const LinearTerm& a, const LinearTerm& b) { return {b - a, Relation::Le}; }
inline LinearConstraint gt(const LinearTerm& a, const LinearTerm& b) { return {b - a, Relation::Lt}; }

class LinearSystem {
public:
    Unknown add_unknown(std::string name = {});
    // Declares an unknown with a caller-chosen id (ids must stay unique).
    void declare(Unknown u, std::string name = {});
    void add(LinearConstraint c) { constraints_.push_back(std::move(c)); }
    void add_all(const std::vector<LinearConstraint>& cs);

    const std::vector<Unknown>& unknowns() const { return unknowns_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    std::vector<LinearConstraint>& constraints() { return constraints_; }
    std::string name(Unknown u) const;
    bool declared(Unknown u) const;
    Unknown next_id() const { return next_; }

    void drop_unknown(Unknown u);
    std::string to_string() const;

private:
    std::vector<Unknown> unknowns_;
    std::map<Unknown, std::string> names_;
    std::vector<LinearConstraint> constraints_;
    Unknown next_ = 0;
};

struct Feasibility {
    bool sat = false;
    Witness witness; // one value per declared unknown when sat
};

Feasibility feasible(const LinearSystem& s);
bool is_feasible(const LinearSystem& s);

// Exact projection: the result constrains the remaining unknowns exactly as
// "exists u. s" does. A contradiction is kept as the constraint 1 <= 0.
LinearSystem eliminate(const LinearSystem& s, Unknown u);
LinearSystem project(const LinearSystem& s, const std::vector<Unknown>& keep);

bool check_witness(const LinearSystem& s, const Witness& w);

// s implies c (s infeasible implies everything).
bool implies(const LinearSystem& s, const LinearConstraint& c);
// Every point of p lies in q.
bool subset(const LinearSystem& p, const LinearSystem& q);
// Drops inequalities implied by the others.
LinearSystem remove_redundant(const LinearSystem& s);

} // namespace tbreach::lra
