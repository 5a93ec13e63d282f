#pragma once

// Canonical textual forms shared by the DSL printer, diagnostics and JSON.

#include "tbreach/model.hpp"

#include <string>
#include <vector>

namespace tbreach {

std::string format_interval(const Interval& i);             // "[0, 1]", "(-inf, 3]"
std::string format_rel(Rel r);                              // "<", "<=", "==", ">=", ">"
std::string format_atom(const Atom& a, const std::vector<std::string>& vars);
std::string format_guard(const Guard& g, const std::vector<std::string>& vars); // "true", "false", "a && b"

} // namespace tbreach
