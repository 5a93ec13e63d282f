#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace tbreach {

using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "n", "-n" and "n/d"; the result is canonicalized.
Rational parse_rational(std::string_view text);

// Always "num/den", also for integers ("3/1"), so outputs are uniform.
std::string to_string(const Rational& q);

BigInt floor(const Rational& q);
BigInt ceil(const Rational& q);

inline Rational from_int(std::int64_t v) { return Rational(static_cast<long>(v)); }

} // namespace tbreach
