#include "roundoff/rounding.hpp"

#include "roundoff/errors.hpp"

#include <functional>
#include <map>
#include <unordered_map>

namespace roundoff {

std::vector<Interval> RoundedExpr::error_box() const {
  std::vector<Interval> box;
  for (const auto& e : errors) box.emplace_back(-e.magnitude, e.magnitude);
  return box;
}

std::vector<Rational> RoundedExpr::magnitudes() const {
  std::vector<Rational> m;
  for (const auto& e : errors) m.push_back(e.magnitude);
  return m;
}

std::vector<Interval> extended_box(const RoundedExpr& r, const std::vector<Interval>& program_box) {
  std::vector<Interval> box(program_box.begin(), program_box.begin() + r.n);
  box.resize(r.index_space, Interval(0));
  for (const auto& e : r.errors) box.emplace_back(-e.magnitude, e.magnitude);
  return box;
}

Rational gamma_k(int k, const Rational& eps) { return k * eps / (1 - k * eps); }

int rounding_factor(const ExprPtr& e, int err_base, ExprPtr* child) {
  if (e->op != Op::Mul) return -1;
  const ExprPtr& f = e->b;
  if (f->op != Op::Add || !is_const(f->a, 1) || f->b->op != Op::Var || f->b->index < err_base) return -1;
  if (child) *child = e->a;
  return f->b->index;
}

namespace {

class Rounder {
 public:
  Rounder(int n, int index_space, const FpFormat& fmt, const RoundingOptions& opt)
      : n_(n), base_(index_space), fmt_(fmt), opt_(opt) {}

  std::vector<ErrorVar> errors;

  ExprPtr run(const ExprPtr& e) { return rec(e); }

 private:
  int n_, base_;
  FpFormat fmt_;
  RoundingOptions opt_;
  std::map<std::string, int> ids_;
  std::unordered_map<const Expr*, int> node_id_;
  std::map<int, ExprPtr> rounded_;  // structural id -> rounded node
  std::map<int, ExprPtr> lets_;

  ExprPtr round(const ExprPtr& x, const Rational& mag, const std::string& why) {
    int j = static_cast<int>(errors.size());
    errors.push_back({j, mag, why});
    return make_mul(x, make_add(make_const(1), make_var(base_ + j)));
  }

  int id_of(const ExprPtr& x) {
    auto it = node_id_.find(x.get());
    if (it != node_id_.end()) return it->second;
    std::string key = std::to_string(static_cast<int>(x->op)) + "|";
    switch (x->op) {
      case Op::Const: key += to_string(x->value); break;
      case Op::Var: key += std::to_string(x->index); break;
      case Op::Transc: key += fn_name(x->fn); break;
      case Op::Let: key += std::to_string(x->index); break;
      default: break;
    }
    for (const ExprPtr* c : {&x->a, &x->b, &x->c}) key += "|" + (*c ? std::to_string(id_of(*c)) : "-");
    if (x->cond)
      key += "|" + std::to_string(id_of(x->cond->lhs)) + "," + std::to_string(id_of(x->cond->rhs)) +
             (x->cond->flipped ? "f" : "") + (x->cond->strict ? "s" : "");
    auto [kit, inserted] = ids_.emplace(key, static_cast<int>(ids_.size()));
    node_id_[x.get()] = kit->second;
    return kit->second;
  }

  ExprPtr rec(const ExprPtr& x) {
    int id = id_of(x);
    auto it = rounded_.find(id);
    if (it != rounded_.end()) return it->second;
    ExprPtr r;
    switch (x->op) {
      case Op::Const: {
        r = x;
        if (opt_.constant_rounding && !is_representable(x->value, fmt_.precision))
          r = round(x, fmt_.eps, "const " + to_string(x->value));
        break;
      }
      case Op::Var: {
        if (x->index >= n_) {
          auto lt = lets_.find(x->index);
          if (lt == lets_.end()) throw UnknownVariable("let slot " + std::to_string(x->index));
          r = lt->second;
        } else if (opt_.input_rounding) {
          r = round(x, fmt_.eps, "input x" + std::to_string(x->index + 1));
        } else {
          r = x;
        }
        break;
      }
      case Op::Neg: {
        r = make_neg(rec(x->a));
        if (opt_.neg_error) r = round(r, fmt_.eps, "neg");
        break;
      }
      case Op::Add: r = round(make_add(rec(x->a), rec(x->b)), fmt_.eps, "add"); break;
      case Op::Sub: r = round(make_sub(rec(x->a), rec(x->b)), fmt_.eps, "sub"); break;
      case Op::Mul: {
        ExprPtr a = rec(x->a);
        ExprPtr b = x->a == x->b ? a : rec(x->b);
        r = round(make_mul(a, b), fmt_.eps, "mul");
        break;
      }
      case Op::Div: r = round(make_div(rec(x->a), rec(x->b)), fmt_.eps, "div"); break;
      case Op::Sqrt: r = round(make_sqrt(rec(x->a)), fmt_.eps, "sqrt"); break;
      case Op::Transc:
        r = round(make_transc(x->fn, rec(x->a)), fmt_.transc_factor[static_cast<int>(x->fn)] * fmt_.eps,
                  fn_name(x->fn));
        break;
      case Op::IfThenElse: {
        auto c = std::make_shared<Condition>(*x->cond);
        c->lhs = rec(x->cond->lhs);
        c->rhs = rec(x->cond->rhs);
        r = make_ite(c, rec(x->b), rec(x->c));
        break;
      }
      case Op::Let: {
        lets_[x->index] = rec(x->a);
        r = rec(x->b);
        break;
      }
    }
    rounded_[id] = r;
    return r;
  }
};

}  // namespace

RoundedExpr round_expr(const ExprPtr& expr, int n, int index_space, const FpFormat& format,
                       const RoundingOptions& options) {
  Rounder rd(n, index_space, format, options);
  RoundedExpr out;
  out.n = n;
  out.index_space = index_space;
  out.exact = expr;
  out.body = rd.run(expr);
  out.errors = rd.errors;
  if (options.merge) out = merge_error_products(out, format);
  return out;
}

RoundedExpr round_program(const ProgramSpec& spec, const RoundingOptions& options) {
  RoundingOptions opt = options;
  opt.merge = false;
  RoundedExpr r = round_expr(spec.objective, spec.n, spec.index_space(), spec.format, opt);
  r = apply_uncertainties(r, spec.uncertainties);
  if (options.merge) r = merge_error_products(r, spec.format);
  return r;
}

namespace {

// Drops unused error variables and renumbers the rest densely.
RoundedExpr compact(const RoundedExpr& r) {
  std::vector<bool> used(r.errors.size(), false);
  std::function<void(const ExprPtr&)> mark;
  std::unordered_map<const Expr*, bool> seen;
  mark = [&](const ExprPtr& x) {
    if (!x || seen.count(x.get())) return;
    seen[x.get()] = true;
    if (x->op == Op::Var && x->index >= r.err_base()) used[x->index - r.err_base()] = true;
    mark(x->a);
    mark(x->b);
    mark(x->c);
    if (x->cond) {
      mark(x->cond->lhs);
      mark(x->cond->rhs);
    }
  };
  mark(r.body);
  RoundedExpr out = r;
  out.errors.clear();
  std::vector<ExprPtr> subs(r.total_vars());
  for (std::size_t j = 0; j < r.errors.size(); ++j) {
    if (!used[j]) continue;
    ErrorVar ev = r.errors[j];
    ev.id = static_cast<int>(out.errors.size());
    if (ev.id != static_cast<int>(j)) subs[r.err_index(static_cast<int>(j))] = make_var(r.err_index(ev.id));
    out.errors.push_back(ev);
  }
  out.body = substitute(r.body, subs);
  return out;
}

}  // namespace

RoundedExpr merge_error_products(const RoundedExpr& rexpr, const FpFormat& format) {
  RoundedExpr out = rexpr;
  const int base = rexpr.err_base();
  struct Prod {
    ExprPtr base;
    std::vector<int> errs;  // error positions, with multiplicity
  };
  std::unordered_map<const Expr*, ExprPtr> memo;
  std::function<ExprPtr(const ExprPtr&)> transform;
  std::function<Prod(const ExprPtr&)> split = [&](const ExprPtr& x) -> Prod {
    ExprPtr child;
    int e = rounding_factor(x, base, &child);
    if (e >= 0) {
      Prod p = split(child);
      p.errs.push_back(e - base);
      return p;
    }
    if (x->op == Op::Mul) {
      Prod a = split(x->a);
      Prod b = x->a == x->b ? a : split(x->b);
      Prod r{make_mul(a.base, b.base), a.errs};
      r.errs.insert(r.errs.end(), b.errs.begin(), b.errs.end());
      return r;
    }
    return {transform(x), {}};
  };
  transform = [&](const ExprPtr& x) -> ExprPtr {
    if (!x) return nullptr;
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    ExprPtr r;
    if (x->op == Op::Mul) {
      Prod p = split(x);
      if (p.errs.empty()) {
        r = p.base;
      } else if (p.errs.size() == 1) {
        r = make_mul(p.base, make_add(make_const(1), make_var(base + p.errs[0])));
      } else {
        int k = static_cast<int>(p.errs.size());
        if (format.eps * k >= 1) throw EpsTooLargeForChain(k);
        bool uniform = true;
        Rational prod = 1;
        for (int j : p.errs) {
          uniform = uniform && out.errors[j].magnitude == format.eps;
          prod *= 1 + out.errors[j].magnitude;
        }
        Rational mag = prod - 1;
        if (uniform && format.eps * k * (k + 1) <= 1) mag = (k + 1) * format.eps;
        int j = static_cast<int>(out.errors.size());
        out.errors.push_back({j, mag, "merged product of " + std::to_string(k) + " factors"});
        r = make_mul(p.base, make_add(make_const(1), make_var(base + j)));
      }
    } else if (x->op == Op::Const || x->op == Op::Var) {
      r = x;
    } else {
      auto n = std::make_shared<Expr>(*x);
      n->a = transform(x->a);
      n->b = transform(x->b);
      n->c = transform(x->c);
      if (x->cond) {
        auto c = std::make_shared<Condition>(*x->cond);
        c->lhs = transform(x->cond->lhs);
        c->rhs = transform(x->cond->rhs);
        n->cond = c;
      }
      r = n;
    }
    memo[x.get()] = r;
    return r;
  };
  // error indices of newly created variables would collide with let-free index space only if
  // the body referenced them, so the old variables stay addressable until compaction
  out.body = transform(rexpr.body);
  return compact(out);
}

RoundedExpr apply_uncertainties(const RoundedExpr& rexpr, const std::vector<Rational>& u) {
  RoundedExpr out = rexpr;
  std::vector<ExprPtr> subs(rexpr.total_vars());
  bool any = false;
  for (int i = 0; i < rexpr.n && i < static_cast<int>(u.size()); ++i) {
    if (u[i] <= 0) continue;
    int j = static_cast<int>(out.errors.size());
    out.errors.push_back({j, u[i], "uncertainty x" + std::to_string(i + 1)});
    subs[i] = make_mul(make_var(i), make_add(make_const(1), make_var(out.err_index(j))));
    any = true;
  }
  if (!any) return rexpr;
  out.body = substitute(rexpr.body, subs);
  return out;
}

}  // namespace roundoff
