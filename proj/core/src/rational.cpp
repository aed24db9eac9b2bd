#include "teachcert/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "teachcert/errors.hpp"

namespace teachcert {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw SchemaError("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    std::string_view digits = num;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
    if (!all_digits(digits) || !all_digits(den))
      throw SchemaError("malformed rational literal '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class d(den, 10);
    if (d == 0) throw SchemaError("zero denominator in '" + s + "'");
    Rational q(mpz_class(num, 10), d);
    q.canonicalize();
    return q;
  }

  // decimal: [sign] int [. frac] [e exp]
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string mantissa;
  long scale = 0;
  bool seen_digit = false;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    mantissa += s[pos++];
    seen_digit = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      mantissa += s[pos++];
      --scale;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw SchemaError("malformed rational literal '" + s + "'");
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    std::string exp = s.substr(pos);
    std::string_view ed = exp;
    if (!ed.empty() && (ed[0] == '-' || ed[0] == '+')) ed.remove_prefix(1);
    if (!all_digits(ed) || ed.size() > 6) throw SchemaError("malformed exponent in '" + s + "'");
    scale += std::stol(exp);
    pos = s.size();
  }
  if (pos != s.size()) throw SchemaError("trailing characters in '" + s + "'");
  Rational q{mpz_class(mantissa, 10)};
  q *= pow10(scale);
  if (negative) q = -q;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw NumericalBreakdown("non-finite value cannot be rationalized");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw NumericalBreakdown("non-finite value cannot be rationalized");
  if (max_den < 1) max_den = 1;
  // Work on the exact binary value so the expansion itself introduces no error.
  Rational rest = exact_from_double(x);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  const mpz_class cap = max_den;
  for (int guard = 0; guard < 200; ++guard) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    mpz_class q2 = a * q1 + q0;
    if (q2 > cap) {
      // best semiconvergent within the cap
      mpz_class k = (cap - q0) / q1;
      mpz_class ps = k * p1 + p0, qs = k * q1 + q0;
      Rational semi(ps, qs), conv(p1, q1), exact = exact_from_double(x);
      semi.canonicalize();
      conv.canonicalize();
      return abs(semi - exact) < abs(conv - exact) ? semi : conv;
    }
    mpz_class p2 = a * p1 + p0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  Rational r(p1, q1);
  r.canonicalize();
  return r;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace teachcert
