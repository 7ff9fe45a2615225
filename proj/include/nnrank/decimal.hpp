#pragma once

#include <string>
#include <string_view>

#include <gmpxx.h>

namespace nnrank {

/// Exact rational value of a finite double.
mpq_class to_rational(double x);

/// Exact, shortest-terminating decimal expansion of a finite double,
/// e.g. 0.5 -> "0.5", 3 -> "3", 2^-30 -> "0.000000000931322574615478515625".
std::string exact_decimal(double x);

/// Parses [-]digits[.digits] exactly. Throws FormatError on anything else.
mpq_class parse_decimal(std::string_view text);

/// Parses a decimal string that must denote a double exactly; strings that
/// would round are rejected with FormatError.
double parse_exact_double(std::string_view text);

}  // namespace nnrank
