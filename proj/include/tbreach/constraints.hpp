#pragma once

// Guards and intervals as linear constraints over arbitrary value terms.

#include "tbreach/lra.hpp"
#include "tbreach/model.hpp"

#include <vector>

namespace tbreach {

// v in I.
void interval_constraints(const Interval& i, const lra::LinearTerm& v, std::vector<lra::LinearConstraint>& out);

// `g` on the given value terms; False yields 1 <= 0.
std::vector<lra::LinearConstraint> guard_constraints(const Guard& g, const std::vector<lra::LinearTerm>& vals);

// Order-independent text key of a system (constraints sorted), for interning.
std::string canonical_key(const lra::LinearSystem& s);

} // namespace tbreach
