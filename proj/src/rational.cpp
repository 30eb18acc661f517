#include "csplab/rational.hpp"

#include "csplab/errors.hpp"

namespace csplab {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ValidationError("empty rational");
  auto dot = s.find('.');
  Rational q;
  try {
    if (dot != std::string::npos) {
      std::string whole = s.substr(0, dot);
      std::string frac = s.substr(dot + 1);
      bool negative = !whole.empty() && whole[0] == '-';
      if (negative) whole.erase(0, 1);
      if (whole.empty()) whole = "0";
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
          whole.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("bad decimal: " + s);
      BigInt den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      q = Rational(BigInt(whole + frac), den);
      q.canonicalize();
      if (negative) q = -q;
      return q;
    }
    if (q.set_str(s, 10) != 0) throw ValidationError("bad rational: " + s);
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad rational: " + s);
  }
  if (q.get_den() == 0) throw ValidationError("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

BigInt ceil_div(const BigInt& num, const BigInt& den) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

BigInt ceil(const Rational& q) { return ceil_div(q.get_num(), q.get_den()); }

}  // namespace csplab
