#include "toric/rational.hpp"

#include <cctype>
#include <cmath>
#include <deque>
#include <string>

#include "toric/error.hpp"

namespace toric {

namespace {

Integer parse_integer(std::string_view text) {
  if (text.empty()) throw Error(Errc::ParseError, "empty integer literal");
  Integer z;
  if (z.set_str(std::string(text), 10) != 0) {
    throw Error(Errc::ParseError, "not an integer: " + std::string(text));
  }
  return z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(Errc::ParseError, "empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error(Errc::ParseError, "zero denominator in " + std::string(text));
    Rational r(parse_integer(text.substr(0, slash)), den);
    r.canonicalize();
    return r;
  }
  if (text.find_first_of(".eE") == std::string_view::npos) {
    return Rational(parse_integer(text));
  }

  // Decimal with optional exponent, parsed exactly.
  std::string s(text);
  std::int64_t exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    try {
      exponent = std::stoll(s.substr(e + 1));
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "bad exponent in " + s);
    }
    s.erase(e);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    exponent -= static_cast<std::int64_t>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s == "-" || s == "+" || s.empty()) throw Error(Errc::ParseError, "bad decimal " + std::string(text));
  if (s.front() == '+') s.erase(0, 1);
  Integer mantissa = parse_integer(s);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  r.canonicalize();
  return r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(Errc::ParseError, "non-finite value");
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(); }

const Integer& factorial(std::int64_t n) {
  if (n < 0) throw Error(Errc::InvalidArgument, "factorial of a negative number");
  // deque keeps references stable as the table grows
  thread_local std::deque<Integer> table{Integer(1)};
  while (static_cast<std::int64_t>(table.size()) <= n) {
    table.push_back(table.back() * static_cast<unsigned long>(table.size()));
  }
  return table[static_cast<std::size_t>(n)];
}

}  // namespace toric
