#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace dlab {

// Exact rational scalar used by the regime classifier. All parameter
// parsing goes through parse_rational so "0.25", "1/4" and "2" stay exact.
using rational = boost::multiprecision::cpp_rational;

// Accepts [sign]digits[.digits] or a quotient of two such literals ("3/8",
// "0.5/2"). Returns nullopt on malformed input.
std::optional<rational> parse_rational(const std::string& text);

// Canonical fraction string, e.g. "-5/2", "3", "0".
std::string rational_string(const rational& r);

double rational_to_double(const rational& r);

} // namespace dlab
