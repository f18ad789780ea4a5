#include "roundoff/rational.hpp"

#include "roundoff/errors.hpp"

#include <cctype>
#include <cmath>

namespace roundoff {

namespace {

Integer pow10(long k) {
  Integer r = 1;
  for (long i = 0; i < k; ++i) r *= 10;
  return r;
}

// floor(q * 2^a)
Integer floor_scaled(const Rational& q, long a) {
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  if (a >= 0)
    num <<= a;
  else
    den <<= -a;
  Integer quo, rem;
  boost::multiprecision::divide_qr(num, den, quo, rem);
  if (rem < 0) quo -= 1;
  return quo;
}

Rational scaled(const Integer& n, long a) {
  Rational r(n);
  if (a >= 0)
    r /= Rational(Integer(1) << a);
  else
    r *= Rational(Integer(1) << -a);
  return r;
}

// Exponent a such that |q| * 2^a lies in [2^(bits-1), 2^(bits+1)).
long scale_for(const Rational& q, int bits) {
  Integer num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
  Integer den = boost::multiprecision::denominator(q);
  long k = static_cast<long>(boost::multiprecision::msb(num)) - static_cast<long>(boost::multiprecision::msb(den));
  return bits - 1 - k;
}

}  // namespace

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  Integer mant = 0;
  long frac_digits = 0;
  bool any = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mant = mant * 10 + (text[i] - '0');
    ++i;
    any = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mant = mant * 10 + (text[i] - '0');
      ++frac_digits;
      ++i;
      any = true;
    }
  }
  if (!any) throw ParseError("malformed number '" + text + "'");
  long exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    bool edig = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exp10 = exp10 * 10 + (text[i] - '0');
      ++i;
      edig = true;
    }
    if (!edig) throw ParseError("malformed exponent in '" + text + "'");
    if (eneg) exp10 = -exp10;
  }
  if (i != text.size()) throw ParseError("trailing characters in number '" + text + "'");
  long e = exp10 - frac_digits;
  Rational r = e >= 0 ? Rational(mant * pow10(e)) : Rational(mant, pow10(-e));
  return neg ? Rational(-r) : r;
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  try {
    Integer p(text.substr(0, slash));
    Integer q(text.substr(slash + 1));
    if (q == 0) throw ParseError("zero denominator in '" + text + "'");
    return Rational(p, q);
  } catch (const std::runtime_error&) {
    throw ParseError("malformed rational '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational pow2(int k) {
  if (k >= 0) return Rational(Integer(1) << k);
  return Rational(Integer(1), Integer(1) << -k);
}

Rational round_down(const Rational& q, int bits) {
  if (q == 0) return q;
  long a = scale_for(q, bits);
  return scaled(floor_scaled(q, a), a);
}

Rational round_up(const Rational& q, int bits) { return -round_down(-q, bits); }

bool is_representable(const Rational& q, int precision) {
  if (q == 0) return true;
  Integer den = boost::multiprecision::denominator(q);
  if ((den & (den - 1)) != 0) return false;
  Integer num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
  num >>= boost::multiprecision::lsb(num);
  return static_cast<long>(boost::multiprecision::msb(num)) + 1 <= precision;
}

Rational round_nearest(const Rational& q, int precision) {
  if (q == 0) return q;
  Integer num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
  Integer den = boost::multiprecision::denominator(q);
  // a makes |q| * 2^a lie in [2^(p-1), 2^p)
  long a = precision - 1 - (static_cast<long>(boost::multiprecision::msb(num)) -
                            static_cast<long>(boost::multiprecision::msb(den)));
  Rational t = abs(q) * pow2(static_cast<int>(a));
  if (t >= pow2(precision)) {
    a -= 1;
    t /= 2;
  } else if (t < pow2(precision - 1)) {
    a += 1;
    t *= 2;
  }
  Integer n = floor_scaled(t, 0);
  Rational frac = t - Rational(n);
  if (frac > Rational(1, 2) || (frac == Rational(1, 2) && (n & 1) != 0)) n += 1;
  Rational r = scaled(n, a);
  return q < 0 ? Rational(-r) : r;
}

std::size_t bit_size(const Rational& q) {
  Integer num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
  Integer den = boost::multiprecision::denominator(q);
  std::size_t b = den == 1 ? 0 : boost::multiprecision::msb(den) + 1;
  if (num != 0) b += boost::multiprecision::msb(num) + 1;
  return b;
}

Rational rationalize(double x, const Integer& max_den) {
  if (!std::isfinite(x)) throw Error("cannot rationalize a non-finite value");
  Rational exact(x);
  // convergents h/k of the continued fraction of exact
  Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Integer num = boost::multiprecision::numerator(exact);
  Integer den = boost::multiprecision::denominator(exact);
  Rational best = 0;
  while (den != 0) {
    Integer a, r;
    boost::multiprecision::divide_qr(num, den, a, r);
    if (r < 0) {
      a -= 1;
      r += den;
    }
    Integer h2 = a * h1 + h0;
    Integer k2 = a * k1 + k0;
    if (k2 > max_den) break;
    best = Rational(h2, k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    num = den;
    den = r;
  }
  if (k1 == 0) return Rational(floor_scaled(exact, 0));
  return best;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace roundoff
