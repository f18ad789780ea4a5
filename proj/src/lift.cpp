#include "roundoff/certify.hpp"
#include "roundoff/engine.hpp"
#include "roundoff/errors.hpp"

namespace roundoff {

std::vector<Rational> default_maxplus_points(const Interval& domain, int count) {
  std::vector<Rational> pts;
  if (count <= 1) return {domain.mid()};
  for (int k = 0; k < count; ++k) pts.push_back(domain.lo() + domain.width() * k / (count - 1));
  return pts;
}

MaxplusApprox transc_approx(Fn kind, const Interval& domain, const std::vector<Rational>& points) {
  MaxplusApprox mp;
  mp.kind = kind;
  mp.domain = domain;
  mp.points = points.empty() ? default_maxplus_points(domain, 3) : points;
  ExprPtr f = make_transc(kind, make_var(0));
  ExprPtr f1 = symbolic_diff(f, 0);
  ExprPtr f2 = symbolic_diff(f1, 0);
  Interval curv = ia_bound(f2, {domain}).tidy(128, 64);
  mp.gamma_lower = std::max(Rational(0), Rational(-curv.lo()));
  mp.gamma_upper = std::max(Rational(0), curv.hi());
  Poly x = Poly::variable(0, 1);
  for (const Rational& p : mp.points) {
    if (!domain.contains(p)) throw DomainViolation(std::string(fn_name(kind)) + " sample point outside the domain");
    Interval fv = apply(kind, Interval(p)).tidy(128, 64);
    Interval d = ia_bound(f1, {Interval(p)}).tidy(128, 64);
    Rational s = round_nearest(d.mid(), 64);
    Rational w = std::max(abs(domain.lo() - p), abs(domain.hi() - p));
    Rational slack = (d - Interval(s)).mag() * w;
    Poly dx = x - Poly::constant(p, 1);
    Poly lin = dx.scale(s);
    mp.lower.push_back(Poly::constant(fv.lo() - slack, 1) + lin - (dx * dx).scale(mp.gamma_lower / 2));
    mp.upper.push_back(Poly::constant(fv.hi() + slack, 1) + lin + (dx * dx).scale(mp.gamma_upper / 2));
  }
  return mp;
}

Lifter::Lifter(int n, std::vector<Interval> box, int maxplus_points) : maxplus_points_(maxplus_points) {
  sys_.n_orig = n;
  sys_.nvars = n;
  box.resize(n);
  sys_.box = std::move(box);
}

Poly Lifter::widen(const Poly& p) const {
  Poly q = p;
  q.set_nvars(sys_.nvars);
  return q;
}

int Lifter::fresh(const std::string& key, const std::string& kind, const ExprPtr& def, const Poly& arg,
                  const Interval& range) {
  auto it = keys_.find(key);
  if (it != keys_.end()) return it->second;
  int idx = sys_.nvars++;
  keys_[key] = idx;
  sys_.box.push_back(range.tidy(128, 64));
  sys_.vars.push_back({kind, def, arg});
  for (auto& g : sys_.constraints) g.set_nvars(sys_.nvars);
  for (auto& g : sys_.equalities) g.set_nvars(sys_.nvars);
  Poly y = Poly::variable(idx, sys_.nvars);
  Poly a = widen(arg);
  auto add_equality = [&](const Poly& e) {
    sys_.equalities.push_back(e);
    sys_.constraints.push_back(e);
    sys_.constraints.push_back(-e);
  };
  if (kind == "inv") {
    add_equality(y * a - Poly::constant(1, sys_.nvars));
  } else if (kind == "sqrt") {
    add_equality(y * y - a);
  } else {
    Fn fn = def->fn;
    Interval dom = ia_bound(def->a, std::vector<Interval>(sys_.box.begin(), sys_.box.begin() + sys_.n_orig));
    MaxplusApprox mp = transc_approx(fn, dom, default_maxplus_points(dom, maxplus_points_));
    for (const auto& lo : mp.lower) sys_.constraints.push_back(y - lo.compose({a}, sys_.nvars));
    for (const auto& up : mp.upper) sys_.constraints.push_back(up.compose({a}, sys_.nvars) - y);
  }
  return idx;
}

Poly Lifter::lift(const ExprPtr& e) {
  auto it = memo_.find(e.get());
  if (it != memo_.end()) return widen(it->second);
  const std::vector<Interval> xbox(sys_.box.begin(), sys_.box.begin() + sys_.n_orig);
  Poly r;
  switch (e->op) {
    case Op::Const: r = Poly::constant(e->value, sys_.nvars); break;
    case Op::Var:
      if (e->index >= sys_.n_orig) throw UnknownVariable("x" + std::to_string(e->index + 1));
      r = Poly::variable(e->index, sys_.nvars);
      break;
    case Op::Neg: r = -lift(e->a); break;
    case Op::Add: {
      Poly a = lift(e->a), b = lift(e->b);
      r = widen(a) + b;
      break;
    }
    case Op::Sub: {
      Poly a = lift(e->a), b = lift(e->b);
      r = widen(a) - b;
      break;
    }
    case Op::Mul: {
      Poly a = lift(e->a);
      Poly b = e->a == e->b ? a : lift(e->b);
      r = widen(a) * widen(b);
      break;
    }
    case Op::Div: {
      std::vector<ExprPtr> factors;
      Rational sign = 1;
      std::function<void(const ExprPtr&)> flatten = [&](const ExprPtr& f) {
        if (f->op == Op::Mul) {
          flatten(f->a);
          flatten(f->b);
        } else if (f->op == Op::Neg) {
          sign = -sign;
          flatten(f->a);
        } else {
          factors.push_back(f);
        }
      };
      flatten(e->b);
      Poly acc = lift(e->a).scale(sign);
      for (const auto& f : factors) {
        if (f->op == Op::Const) {
          if (f->value == 0) throw DivisionByZeroInterval("constant zero denominator");
          acc = widen(acc).scale(1 / f->value);
          continue;
        }
        Poly pf = lift(f);
        if (pf.is_constant()) {
          if (pf.constant_term() == 0) throw DivisionByZeroInterval("zero denominator");
          acc = widen(acc).scale(1 / pf.constant_term());
          continue;
        }
        Interval den = ia_bound(f, xbox);
        if (den.contains_zero()) throw DivisionByZeroInterval("lifted denominator with range " + den.str());
        int z = fresh("inv:" + poly_to_text(pf), "inv", make_div(make_const(1), f), pf, Interval(1) / den);
        acc = widen(acc) * Poly::variable(z, sys_.nvars);
      }
      r = acc;
      break;
    }
    case Op::Sqrt: {
      Poly a = lift(e->a);
      if (a.is_constant() && a.constant_term() == 0) {
        r = Poly(sys_.nvars);
        break;
      }
      Interval ra = ia_bound(e->a, xbox);
      if (ra.hi() < 0) throw DomainViolation("sqrt of a negative range");
      Interval range = sqrt(Interval(std::max(Rational(0), ra.lo()), ra.hi()));
      int y = fresh("sqrt:" + poly_to_text(a), "sqrt", e, a, range);
      r = Poly::variable(y, sys_.nvars);
      break;
    }
    case Op::Transc: {
      Poly a = lift(e->a);
      Interval range = ia_bound(e, xbox);
      int y = fresh(std::string(fn_name(e->fn)) + ":" + poly_to_text(a), fn_name(e->fn), e, a, range);
      r = Poly::variable(y, sys_.nvars);
      break;
    }
    case Op::Let: r = lift(inline_lets(e)); break;
    case Op::IfThenElse: throw Error("conditionals cannot be lifted");
  }
  r = widen(r);
  memo_[e.get()] = r;
  return r;
}

std::vector<double> lifted_point(const LiftedSystem& sys, const std::vector<double>& x) {
  std::vector<double> p(x.begin(), x.begin() + sys.n_orig);
  for (const auto& v : sys.vars) p.push_back(eval_double(v.definition, x));
  return p;
}

}  // namespace roundoff
