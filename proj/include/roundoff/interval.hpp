#pragma once

#include "roundoff/polynomial.hpp"
#include "roundoff/program.hpp"
#include "roundoff/rational.hpp"

#include <string>
#include <vector>

namespace roundoff {

class Interval {
 public:
  Interval() = default;
  Interval(const Rational& v) : lo_(v), hi_(v) {}  // NOLINT(google-explicit-constructor)
  Interval(const Rational& lo, const Rational& hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational mid() const { return (lo_ + hi_) / 2; }
  // max(|lo|, |hi|)
  Rational mag() const;
  // min |x| over the interval
  Rational mig() const;

  bool contains(const Rational& v) const { return lo_ <= v && v <= hi_; }
  bool contains(double v) const;
  bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }
  bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
  bool is_point() const { return lo_ == hi_; }

  Interval operator-() const { return Interval(-hi_, -lo_); }
  Interval& operator+=(const Interval& o);

  // Widens endpoints outward to short dyadics when their bit size gets large.
  Interval tidy(int max_bits = 512, int keep_bits = 256) const;

  std::string str() const;

 private:
  Rational lo_ = 0, hi_ = 0;
};

inline bool operator==(const Interval& a, const Interval& b) { return a.lo() == b.lo() && a.hi() == b.hi(); }

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
// Throws DivisionByZeroInterval when 0 is in b.
Interval operator/(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
// Intersection; throws Error when empty.
Interval intersect(const Interval& a, const Interval& b);
bool intersects(const Interval& a, const Interval& b);

Interval pow(const Interval& a, unsigned k);
Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval tan(const Interval& a);
Interval atan(const Interval& a);
Interval asin(const Interval& a);
Interval acos(const Interval& a);
Interval apply(Fn f, const Interval& a);

// Enclosure of pi.
Interval pi_interval();

// Naive recursive interval evaluation; box is indexed by variable index and must cover every
// program variable of the expression (let indices are bound internally).
Interval ia_bound(const ExprPtr& e, const std::vector<Interval>& box);
Interval ia_bound(const Poly& p, const std::vector<Interval>& box);

// Enclosure [-B, B] of the second-order remainder of `body` in the variables err_index
// (with |e_j| <= b[j]) over the box (which also covers the error variables).
// B = 1/2 sum_{i,j} sup |d2 body / de_i de_j| b_i b_j, with each sup bounded by ia_bound.
Interval taylor_remainder_bound(const ExprPtr& body, const std::vector<Interval>& box,
                                const std::vector<int>& err_index, const std::vector<Rational>& b);

// Same quantity bounded by forward propagation of first/second derivative majorants; cost is
// linear in the expression size, which makes it usable for hundreds of error variables.
Interval taylor_remainder_majorant(const ExprPtr& body, const std::vector<Interval>& box,
                                   const std::vector<int>& err_index, const std::vector<Rational>& b);

// Upper bound of sum_j b_j |d body / de_j| over the box.
Rational first_order_majorant(const ExprPtr& body, const std::vector<Interval>& box,
                              const std::vector<int>& err_index, const std::vector<Rational>& b);

}  // namespace roundoff
