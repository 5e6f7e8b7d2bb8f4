#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace toric {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p", "p/q" or a decimal literal ("0.25", "1e-3") into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact binary value of a finite double.
Rational rational_from_double(double value);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value);

/// n! for small n, memoized per thread.
const Integer& factorial(std::int64_t n);

}  // namespace toric
