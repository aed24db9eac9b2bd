#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace teachcert {

/// Exact rational scalar used by every model, polynomial and audit path.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "p/q", integers, and decimal strings ("0.25", "-1.5e-3") exactly.
/// Throws SchemaError on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational exact_from_double(double x);

/// Best rational approximation with denominator <= max_den via continued fractions.
Rational rationalize(double x, std::int64_t max_den = 1'000'000);

double to_double(const Rational& q);

}  // namespace teachcert
