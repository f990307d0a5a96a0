#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace markov {

using Int = boost::multiprecision::cpp_int;

/// Exact rational number, always in lowest terms with positive denominator.
using Rat = boost::multiprecision::cpp_rational;

/// Parses "p/q" or "p" with optional leading '-' on p; q must be a positive integer.
/// Throws ParseError on anything else.
Rat rat_from_string(const std::string& text);

/// Canonical form: "p/q" in lowest terms, or just "p" when q == 1.
std::string rat_to_string(const Rat& value);

}  // namespace markov
