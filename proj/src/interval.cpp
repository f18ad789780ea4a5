#include "roundoff/interval.hpp"

#include "roundoff/errors.hpp"

#include <mpfr.h>

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace roundoff {

namespace {

constexpr mpfr_prec_t kPrec = 160;

class Mp {
 public:
  Mp() { mpfr_init2(v_, kPrec); }
  Mp(const Rational& q, mpfr_rnd_t rnd) : Mp() { mpfr_set_q(v_, q.backend().data(), rnd); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  ~Mp() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  Rational to_rational() const {
    Rational q;
    mpfr_get_q(q.backend().data(), v_);
    return q;
  }

 private:
  mpfr_t v_;
};

using MpFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

Rational eval_dir(MpFn f, const Rational& x, mpfr_rnd_t arg_rnd, mpfr_rnd_t rnd) {
  Mp a(x, arg_rnd), r;
  f(r.get(), a.get(), rnd);
  if (mpfr_nan_p(r.get()) || mpfr_inf_p(r.get())) throw DomainViolation("interval function evaluation");
  return r.to_rational();
}

// Enclosure of f(x) at a single rational point; correct for any function that is monotone on
// the tiny interval between the rounded arguments.
Interval point_enclosure(MpFn f, const Rational& x) {
  Rational a = eval_dir(f, x, MPFR_RNDD, MPFR_RNDD);
  Rational b = eval_dir(f, x, MPFR_RNDU, MPFR_RNDU);
  Rational c = eval_dir(f, x, MPFR_RNDD, MPFR_RNDU);
  Rational d = eval_dir(f, x, MPFR_RNDU, MPFR_RNDD);
  return Interval(std::min({a, b, c, d}), std::max({a, b, c, d}));
}

Interval increasing(MpFn f, const Interval& x) {
  return Interval(eval_dir(f, x.lo(), MPFR_RNDD, MPFR_RNDD), eval_dir(f, x.hi(), MPFR_RNDU, MPFR_RNDU))
      .tidy();
}

Interval decreasing(MpFn f, const Interval& x) {
  return Interval(eval_dir(f, x.hi(), MPFR_RNDU, MPFR_RNDD), eval_dir(f, x.lo(), MPFR_RNDD, MPFR_RNDU))
      .tidy();
}

Rational qfloor(const Rational& q) {
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  Integer quo, rem;
  boost::multiprecision::divide_qr(num, den, quo, rem);
  if (rem < 0) quo -= 1;
  return Rational(quo);
}

// True when some point offset + k*period (k integer) may lie in x.
bool hits_lattice(const Interval& x, const Interval& offset, const Interval& period) {
  // k range where offset + k*period can intersect x
  Rational kmin = qfloor((x.lo() - offset.hi()) / period.hi()) - 1;
  Rational kmax = qfloor((x.hi() - offset.lo()) / period.lo()) + 1;
  if (kmax - kmin > 8) return true;
  for (Rational k = kmin; k <= kmax; k += 1) {
    Interval p = offset + Interval(k) * period;
    if (intersects(p, x)) return true;
  }
  return false;
}

Interval sin_cos(const Interval& x, bool is_cos) {
  Interval pi = pi_interval();
  Interval two_pi = Interval(2) * pi;
  if (x.width() >= two_pi.lo()) return Interval(-1, 1);
  MpFn f = is_cos ? static_cast<MpFn>(mpfr_cos) : static_cast<MpFn>(mpfr_sin);
  Interval a = point_enclosure(f, x.lo());
  Interval b = point_enclosure(f, x.hi());
  Interval r = hull(a, b);
  Rational lo = r.lo(), hi = r.hi();
  Interval half_pi = pi / Interval(2);
  Interval max_at = is_cos ? Interval(0) : half_pi;
  Interval min_at = is_cos ? pi : -half_pi;
  if (hits_lattice(x, max_at, two_pi)) hi = 1;
  if (hits_lattice(x, min_at, two_pi)) lo = -1;
  return Interval(std::max(lo, Rational(-1)), std::min(hi, Rational(1))).tidy();
}

}  // namespace

Interval::Interval(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
  if (lo_ > hi_) throw Error("interval with lo > hi");
}

Rational Interval::mag() const { return std::max(abs(lo_), abs(hi_)); }

Rational Interval::mig() const {
  if (contains_zero()) return 0;
  return std::min(abs(lo_), abs(hi_));
}

bool Interval::contains(double v) const {
  Rational q(v);
  return contains(q);
}

Interval& Interval::operator+=(const Interval& o) {
  lo_ += o.lo_;
  hi_ += o.hi_;
  return *this;
}

Interval Interval::tidy(int max_bits, int keep_bits) const {
  if (bit_size(lo_) <= static_cast<std::size_t>(max_bits) && bit_size(hi_) <= static_cast<std::size_t>(max_bits))
    return *this;
  Interval r;
  r.lo_ = bit_size(lo_) > static_cast<std::size_t>(max_bits) ? round_down(lo_, keep_bits) : lo_;
  r.hi_ = bit_size(hi_) > static_cast<std::size_t>(max_bits) ? round_up(hi_, keep_bits) : hi_;
  return r;
}

std::string Interval::str() const { return "[" + to_string(lo_) + ", " + to_string(hi_) + "]"; }

Interval operator+(const Interval& a, const Interval& b) { return Interval(a.lo() + b.lo(), a.hi() + b.hi()).tidy(); }

Interval operator-(const Interval& a, const Interval& b) { return Interval(a.lo() - b.hi(), a.hi() - b.lo()).tidy(); }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) return Interval(a.lo() * b.lo()).tidy();
  Rational p[4] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
  return Interval(*std::min_element(p, p + 4), *std::max_element(p, p + 4)).tidy();
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DivisionByZeroInterval(b.str());
  return a * Interval(1 / b.hi(), 1 / b.lo());
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

bool intersects(const Interval& a, const Interval& b) { return a.lo() <= b.hi() && b.lo() <= a.hi(); }

Interval intersect(const Interval& a, const Interval& b) {
  if (!intersects(a, b)) throw Error("empty interval intersection");
  return Interval(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Interval pow(const Interval& a, unsigned k) {
  if (k == 0) return Interval(1);
  auto ipow = [](const Rational& x, unsigned n) {
    Rational r = 1;
    for (unsigned i = 0; i < n; ++i) r *= x;
    return r;
  };
  if (k % 2 == 1) return Interval(ipow(a.lo(), k), ipow(a.hi(), k)).tidy();
  if (a.contains_zero()) return Interval(0, ipow(a.mag(), k)).tidy();
  return Interval(ipow(a.mig(), k), ipow(a.mag(), k)).tidy();
}

Interval sqr(const Interval& a) { return pow(a, 2); }

Interval sqrt(const Interval& a) {
  if (a.lo() < 0) throw DomainViolation("sqrt");
  return increasing(mpfr_sqrt, a);
}

Interval exp(const Interval& a) { return increasing(mpfr_exp, a); }

Interval log(const Interval& a) {
  if (a.lo() <= 0) throw DomainViolation("log");
  return increasing(mpfr_log, a);
}

Interval sin(const Interval& a) { return sin_cos(a, false); }
Interval cos(const Interval& a) { return sin_cos(a, true); }

Interval tan(const Interval& a) {
  Interval pi = pi_interval();
  if (a.width() >= pi.lo() || hits_lattice(a, pi / Interval(2), pi)) throw DomainViolation("tan");
  return increasing(mpfr_tan, a);
}

Interval atan(const Interval& a) { return increasing(mpfr_atan, a); }

Interval asin(const Interval& a) {
  if (a.lo() < -1 || a.hi() > 1) throw DomainViolation("asin");
  Interval r = increasing(mpfr_asin, a);
  return r;
}

Interval acos(const Interval& a) {
  if (a.lo() < -1 || a.hi() > 1) throw DomainViolation("acos");
  return decreasing(mpfr_acos, a);
}

Interval apply(Fn f, const Interval& a) {
  switch (f) {
    case Fn::Exp: return exp(a);
    case Fn::Log: return log(a);
    case Fn::Sin: return sin(a);
    case Fn::Cos: return cos(a);
    case Fn::Tan: return tan(a);
    case Fn::Atan: return atan(a);
    case Fn::Asin: return asin(a);
    case Fn::Acos: return acos(a);
  }
  throw Error("unknown function");
}

Interval pi_interval() {
  static const Interval pi = [] {
    Mp lo, hi;
    mpfr_const_pi(lo.get(), MPFR_RNDD);
    mpfr_const_pi(hi.get(), MPFR_RNDU);
    return Interval(lo.to_rational(), hi.to_rational());
  }();
  return pi;
}

// ---------------------------------------------------------------------------

Interval ia_bound(const ExprPtr& e, const std::vector<Interval>& box) {
  std::vector<Interval> env(box);
  std::vector<bool> bound(box.size(), true);
  std::unordered_map<const Expr*, Interval> memo;
  std::function<Interval(const ExprPtr&)> rec = [&](const ExprPtr& x) -> Interval {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    Interval r;
    switch (x->op) {
      case Op::Const: r = Interval(x->value); break;
      case Op::Var:
        if (x->index >= static_cast<int>(env.size()) || !bound[x->index])
          throw Error("ia_bound: variable " + std::to_string(x->index) + " not in box");
        r = env[x->index];
        break;
      case Op::Neg: r = -rec(x->a); break;
      case Op::Add: r = rec(x->a) + rec(x->b); break;
      case Op::Sub: r = rec(x->a) - rec(x->b); break;
      case Op::Mul:
        if (x->a == x->b)
          r = sqr(rec(x->a));
        else
          r = rec(x->a) * rec(x->b);
        break;
      case Op::Div: r = rec(x->a) / rec(x->b); break;
      case Op::Sqrt: r = sqrt(rec(x->a)); break;
      case Op::Transc: r = apply(x->fn, rec(x->a)); break;
      case Op::IfThenElse: r = hull(rec(x->b), rec(x->c)); break;
      case Op::Let: {
        if (static_cast<int>(env.size()) <= x->index) {
          env.resize(x->index + 1);
          bound.resize(x->index + 1, false);
        }
        env[x->index] = rec(x->a);
        bound[x->index] = true;
        r = rec(x->b);
        break;
      }
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(e);
}

Interval ia_bound(const Poly& p, const std::vector<Interval>& box) {
  Interval sum(0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, Interval> powers;
  for (const auto& [m, c] : p.terms()) {
    Interval term(c);
    for (const auto& [v, e] : m.entries()) {
      auto key = std::make_pair(v, e);
      auto it = powers.find(key);
      if (it == powers.end()) it = powers.emplace(key, pow(box.at(v), e)).first;
      term = term * it->second;
    }
    sum += term;
  }
  return sum.tidy();
}

Interval taylor_remainder_bound(const ExprPtr& body, const std::vector<Interval>& box,
                                const std::vector<int>& err_index, const std::vector<Rational>& b) {
  ExprPtr f = inline_lets(body);
  Rational total = 0;
  std::vector<ExprPtr> first(err_index.size());
  for (std::size_t i = 0; i < err_index.size(); ++i) first[i] = symbolic_diff(f, err_index[i]);
  for (std::size_t i = 0; i < err_index.size(); ++i) {
    for (std::size_t j = i; j < err_index.size(); ++j) {
      ExprPtr second = symbolic_diff(first[i], err_index[j]);
      if (second->op == Op::Const && second->value == 0) continue;
      Rational s = ia_bound(second, box).mag();
      total += (i == j ? 1 : 2) * s * b[i] * b[j];
    }
  }
  total /= 2;
  return Interval(-total, total);
}

namespace {

struct Majorant {
  Interval v;
  Rational g = 0;  // sum_j b_j sup |du/de_j|
  Rational h = 0;  // sum_{i,k} b_i b_k sup |d2u/de_i de_k|
};

// Composition with a scalar function phi whose derivative ranges over d1 and d2.
Majorant compose(const Majorant& u, const Interval& value, const Interval& d1, const Interval& d2) {
  Majorant r;
  r.v = value;
  r.g = d1.mag() * u.g;
  r.h = d2.mag() * u.g * u.g + d1.mag() * u.h;
  return r;
}

Majorant mul(const Majorant& a, const Majorant& b, bool same) {
  Majorant r;
  r.v = same ? sqr(a.v) : a.v * b.v;
  r.g = a.g * b.v.mag() + a.v.mag() * b.g;
  r.h = a.h * b.v.mag() + 2 * a.g * b.g + a.v.mag() * b.h;
  return r;
}

}  // namespace

namespace {

Majorant majorant_pass(const ExprPtr& body, const std::vector<Interval>& box, const std::vector<int>& err_index,
                       const std::vector<Rational>& b) {
  std::map<int, Rational> err_mag;
  for (std::size_t i = 0; i < err_index.size(); ++i) err_mag[err_index[i]] = b[i];
  std::map<int, Majorant> lets;
  std::unordered_map<const Expr*, Majorant> memo;
  std::function<Majorant(const ExprPtr&)> rec = [&](const ExprPtr& x) -> Majorant {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    Majorant r;
    switch (x->op) {
      case Op::Const: r.v = Interval(x->value); break;
      case Op::Var: {
        auto lt = lets.find(x->index);
        if (lt != lets.end()) {
          r = lt->second;
          break;
        }
        r.v = box.at(x->index);
        auto em = err_mag.find(x->index);
        if (em != err_mag.end()) r.g = em->second;
        break;
      }
      case Op::Neg: {
        r = rec(x->a);
        r.v = -r.v;
        break;
      }
      case Op::Add:
      case Op::Sub: {
        Majorant a = rec(x->a), c = rec(x->b);
        r.v = x->op == Op::Add ? a.v + c.v : a.v - c.v;
        r.g = a.g + c.g;
        r.h = a.h + c.h;
        break;
      }
      case Op::Mul: r = mul(rec(x->a), rec(x->b), x->a == x->b); break;
      case Op::Div: {
        Majorant den = rec(x->b);
        Interval inv = Interval(1) / den.v;
        Interval inv2 = sqr(inv);
        Majorant recip = compose(den, inv, inv2, Interval(2) * inv2 * inv);
        r = mul(rec(x->a), recip, false);
        break;
      }
      case Op::Sqrt: {
        Majorant u = rec(x->a);
        Interval s = sqrt(u.v);
        if (s.lo() <= 0) throw DomainViolation("sqrt derivative at 0");
        Interval d1 = Interval(1) / (Interval(2) * s);
        Interval d2 = -(d1 / (Interval(2) * u.v));
        r = compose(u, s, d1, d2);
        break;
      }
      case Op::Transc: {
        Majorant u = rec(x->a);
        const Interval& t = u.v;
        Interval val = apply(x->fn, t), d1, d2;
        switch (x->fn) {
          case Fn::Exp: d1 = val; d2 = val; break;
          case Fn::Log: d1 = Interval(1) / t; d2 = -sqr(d1); break;
          case Fn::Sin: d1 = cos(t); d2 = -val; break;
          case Fn::Cos: d1 = -sin(t); d2 = -val; break;
          case Fn::Tan: d1 = Interval(1) + sqr(val); d2 = Interval(2) * val * d1; break;
          case Fn::Atan: {
            Interval q = Interval(1) + sqr(t);
            d1 = Interval(1) / q;
            d2 = Interval(-2) * t / sqr(q);
            break;
          }
          case Fn::Asin:
          case Fn::Acos: {
            Interval q = Interval(1) - sqr(t);
            Interval s = sqrt(q);
            d1 = Interval(1) / s;
            d2 = t / (q * s);
            if (x->fn == Fn::Acos) {
              d1 = -d1;
              d2 = -d2;
            }
            break;
          }
        }
        r = compose(u, val, d1, d2);
        break;
      }
      case Op::IfThenElse: {
        Majorant a = rec(x->b), c = rec(x->c);
        r.v = hull(a.v, c.v);
        r.g = std::max(a.g, c.g);
        r.h = std::max(a.h, c.h);
        break;
      }
      case Op::Let: {
        lets[x->index] = rec(x->a);
        r = rec(x->b);
        break;
      }
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(body);
}

}  // namespace

Interval taylor_remainder_majorant(const ExprPtr& body, const std::vector<Interval>& box,
                                   const std::vector<int>& err_index, const std::vector<Rational>& b) {
  Rational bound = majorant_pass(body, box, err_index, b).h / 2;
  return Interval(-bound, bound);
}

Rational first_order_majorant(const ExprPtr& body, const std::vector<Interval>& box,
                              const std::vector<int>& err_index, const std::vector<Rational>& b) {
  return majorant_pass(body, box, err_index, b).g;
}

}  // namespace roundoff
