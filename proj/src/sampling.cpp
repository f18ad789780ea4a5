#include "roundoff/sampling.hpp"

#include "roundoff/errors.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace roundoff {

namespace {

struct Node {
  Op op = Op::Const;
  Fn fn = Fn::Exp;
  int index = -1;
  int a = -1, b = -1, c = -1;
  int lhs = -1, rhs = -1;
  bool flipped = false, strict = false;
  Rational value;
};

// Post-order list of the DAG with lets inlined.
class Tape {
 public:
  explicit Tape(const ExprPtr& e) { root_ = add(inline_lets(e)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<const Expr*, int> ids_;
  std::vector<ExprPtr> keep_;
  int root_;

  int add(const ExprPtr& e) {
    if (!e) return -1;
    auto it = ids_.find(e.get());
    if (it != ids_.end()) return it->second;
    Node n;
    n.op = e->op;
    n.fn = e->fn;
    n.index = e->index;
    n.a = add(e->a);
    n.b = add(e->b);
    n.c = add(e->c);
    if (e->cond) {
      n.lhs = add(e->cond->lhs);
      n.rhs = add(e->cond->rhs);
      n.flipped = e->cond->flipped;
      n.strict = e->cond->strict;
    }
    if (e->op == Op::Const) n.value = e->value;
    nodes_.push_back(n);
    keep_.push_back(e);
    return ids_[e.get()] = static_cast<int>(nodes_.size()) - 1;
  }
};

class Evaluator {
 public:
  Evaluator(const Tape& tape, mpfr_prec_t prec) : tape_(tape), prec_(prec), v_(tape.nodes().size()) {
    for (auto& x : v_) mpfr_init2(x, prec);
    mpq_init(q_);
  }
  ~Evaluator() {
    for (auto& x : v_) mpfr_clear(x);
    mpq_clear(q_);
  }
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  // Returns false when the value is undefined (NaN or infinite).
  bool run(const std::vector<mpfr_ptr>& inputs, mpfr_ptr out) {
    const auto& N = tape_.nodes();
    for (std::size_t k = 0; k < N.size(); ++k) {
      const Node& n = N[k];
      mpfr_ptr r = v_[k];
      switch (n.op) {
        case Op::Const:
          mpq_set(q_, n.value.backend().data());
          mpfr_set_q(r, q_, MPFR_RNDN);
          break;
        case Op::Var: mpfr_set(r, inputs.at(n.index), MPFR_RNDN); break;
        case Op::Neg: mpfr_neg(r, v_[n.a], MPFR_RNDN); break;
        case Op::Add: mpfr_add(r, v_[n.a], v_[n.b], MPFR_RNDN); break;
        case Op::Sub: mpfr_sub(r, v_[n.a], v_[n.b], MPFR_RNDN); break;
        case Op::Mul: mpfr_mul(r, v_[n.a], v_[n.b], MPFR_RNDN); break;
        case Op::Div: mpfr_div(r, v_[n.a], v_[n.b], MPFR_RNDN); break;
        case Op::Sqrt: mpfr_sqrt(r, v_[n.a], MPFR_RNDN); break;
        case Op::Transc: {
          mpfr_srcptr a = v_[n.a];
          switch (n.fn) {
            case Fn::Exp: mpfr_exp(r, a, MPFR_RNDN); break;
            case Fn::Log: mpfr_log(r, a, MPFR_RNDN); break;
            case Fn::Cos: mpfr_cos(r, a, MPFR_RNDN); break;
            case Fn::Sin: mpfr_sin(r, a, MPFR_RNDN); break;
            case Fn::Tan: mpfr_tan(r, a, MPFR_RNDN); break;
            case Fn::Acos: mpfr_acos(r, a, MPFR_RNDN); break;
            case Fn::Asin: mpfr_asin(r, a, MPFR_RNDN); break;
            case Fn::Atan: mpfr_atan(r, a, MPFR_RNDN); break;
          }
          break;
        }
        case Op::IfThenElse: {
          int cmp = mpfr_cmp(v_[n.lhs], v_[n.rhs]);
          if (n.flipped) cmp = -cmp;
          bool take = n.strict ? cmp > 0 : cmp >= 0;
          mpfr_set(r, v_[take ? n.b : n.c], MPFR_RNDN);
          break;
        }
        case Op::Let: throw Error("unexpected let in sampling tape");
      }
    }
    mpfr_set(out, v_[tape_.root()], MPFR_RNDN);
    return mpfr_number_p(out);
  }

 private:
  const Tape& tape_;
  mpfr_prec_t prec_;
  std::vector<mpfr_t> v_;
  mpq_t q_;
};

bool satisfies(const std::vector<Poly>& constraints, const std::vector<mpfr_ptr>& x, mpfr_prec_t prec) {
  if (constraints.empty()) return true;
  mpfr_t acc, term, p;
  mpfr_inits2(prec, acc, term, p, static_cast<mpfr_ptr>(nullptr));
  mpq_t q;
  mpq_init(q);
  bool ok = true;
  for (const auto& g : constraints) {
    mpfr_set_zero(acc, 1);
    for (const auto& [m, c] : g.terms()) {
      mpq_set(q, c.backend().data());
      mpfr_set_q(term, q, MPFR_RNDN);
      for (const auto& [var, e] : m.entries()) {
        mpfr_pow_ui(p, x[var], e, MPFR_RNDN);
        mpfr_mul(term, term, p, MPFR_RNDN);
      }
      mpfr_add(acc, acc, term, MPFR_RNDN);
    }
    if (mpfr_sgn(acc) < 0) {
      ok = false;
      break;
    }
  }
  mpq_clear(q);
  mpfr_clears(acc, term, p, static_cast<mpfr_ptr>(nullptr));
  return ok;
}

// Double-precision view of the constraints, used for the feasibility pilot and the
// hit-and-run walk over thin constraint sets.
class ConstraintWalker {
 public:
  explicit ConstraintWalker(const ProgramSpec& spec) : n_(spec.n) {
    for (int i = 0; i < n_; ++i) {
      lo_.push_back(to_double(spec.box_lo[i]));
      hi_.push_back(to_double(spec.box_hi[i]));
    }
    for (const auto& g : spec.constraints) {
      std::vector<Term> terms;
      for (const auto& [m, c] : g.terms()) {
        Term t{to_double(c), {}};
        for (const auto& [v, e] : m.entries()) t.powers.emplace_back(static_cast<int>(v), static_cast<int>(e));
        terms.push_back(std::move(t));
      }
      g_.push_back(std::move(terms));
    }
  }

  double violation(const std::vector<double>& x) const {
    double v = 0;
    for (const auto& g : g_) {
      double s = 0;
      for (const auto& t : g) {
        double p = t.coef;
        for (auto [var, e] : t.powers) p *= std::pow(x[var], e);
        s += p;
      }
      if (s < 0) v -= s;
    }
    return v;
  }

  double acceptance_rate(std::uint64_t seed, int trials) const {
    std::mt19937_64 rng(seed);
    int ok = 0;
    std::vector<double> x(n_);
    for (int t = 0; t < trials; ++t) {
      uniform(x, rng);
      if (violation(x) == 0) ++ok;
    }
    return static_cast<double>(ok) / trials;
  }

  // Random restarts followed by pattern search on the total violation.
  std::vector<double> feasible_point(std::uint64_t seed) const {
    std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
    std::vector<double> x(n_);
    for (int restart = 0; restart < 20; ++restart) {
      uniform(x, rng);
      double v = violation(x);
      for (double step = 0.25; step > 1e-12 && v > 0; step /= 2) {
        bool improved = true;
        while (improved && v > 0) {
          improved = false;
          for (int i = 0; i < n_; ++i)
            for (double dir : {1.0, -1.0}) {
              std::vector<double> y = x;
              y[i] = std::clamp(y[i] + dir * step * (hi_[i] - lo_[i]), lo_[i], hi_[i]);
              double vy = violation(y);
              if (vy < v) {
                x = std::move(y);
                v = vy;
                improved = true;
              }
            }
        }
      }
      if (v == 0) return x;
    }
    throw RejectionSamplingStarved(0.0);
  }

  // One hit-and-run step with shrinking on rejection; stays inside the constraint set.
  void step(std::vector<double>& x, std::mt19937_64& rng) const {
    std::normal_distribution<double> normal;
    std::vector<double> d(n_);
    double norm = 0;
    for (auto& di : d) {
      di = normal(rng);
      norm += di * di;
    }
    norm = std::sqrt(norm);
    if (norm == 0) return;
    double tmin = -std::numeric_limits<double>::infinity(), tmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) {
      d[i] /= norm;
      if (d[i] == 0) continue;
      double a = (lo_[i] - x[i]) / d[i], b = (hi_[i] - x[i]) / d[i];
      tmin = std::max(tmin, std::min(a, b));
      tmax = std::min(tmax, std::max(a, b));
    }
    if (!(tmin <= tmax)) return;
    std::vector<double> y(n_);
    for (int attempt = 0; attempt < 60; ++attempt) {
      double t = std::uniform_real_distribution<double>(tmin, tmax)(rng);
      for (int i = 0; i < n_; ++i) y[i] = std::clamp(x[i] + t * d[i], lo_[i], hi_[i]);
      if (violation(y) == 0) {
        x = y;
        return;
      }
      if (t < 0) tmin = t;
      else tmax = t;
    }
  }

 private:
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> powers;
  };
  int n_;
  std::vector<double> lo_, hi_;
  std::vector<std::vector<Term>> g_;

  void uniform(std::vector<double>& x, std::mt19937_64& rng) const {
    for (int i = 0; i < n_; ++i) x[i] = std::uniform_real_distribution<double>(lo_[i], hi_[i])(rng);
  }
};

}  // namespace

SampleResult sample_error(const ProgramSpec& spec, const SampleOptions& opt) {
  validate_spec(spec);
  const Tape tape(spec.objective);
  const mpfr_prec_t fprec = spec.format.precision;
  const mpfr_prec_t rprec = std::max(opt.reference_bits, 2 * spec.format.precision + 64);
  const int n = spec.n;
  const int slots = std::max(spec.index_space(), n);

  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(64, opt.samples));
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::uint64_t>(threads, chunks));

  struct ChunkResult {
    double max_error = -1;
    std::vector<double> argmax;
    std::uint64_t accepted = 0, rejected = 0, invalid = 0;
  };
  std::vector<ChunkResult> results(chunks);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::uint64_t> next{0};

  std::vector<Rational> width;
  for (int i = 0; i < n; ++i) width.push_back(spec.box_hi[i] - spec.box_lo[i]);
  const ConstraintWalker walker(spec);
  bool walk = false;
  std::vector<double> start;
  if (!spec.constraints.empty()) {
    double rate = walker.acceptance_rate(opt.seed, 10000);
    if (rate < 1e-4) {
      if (!opt.walk_fallback) throw RejectionSamplingStarved(rate);
      start = walker.feasible_point(opt.seed);
      walk = true;
    }
  }

  auto worker = [&] {
    Evaluator fexec(tape, fprec), rexec(tape, rprec);
    std::vector<mpfr_t> xr(slots), xf(slots);
    for (int i = 0; i < slots; ++i) {
      mpfr_init2(xr[i], rprec);
      mpfr_init2(xf[i], fprec);
      mpfr_set_zero(xr[i], 1);
      mpfr_set_zero(xf[i], 1);
    }
    std::vector<mpfr_ptr> pr(slots), pf(slots);
    for (int i = 0; i < slots; ++i) {
      pr[i] = xr[i];
      pf[i] = xf[i];
    }
    mpfr_t u, outf, outr, diff;
    mpfr_inits2(rprec, u, outf, outr, diff, static_cast<mpfr_ptr>(nullptr));
    gmp_randstate_t rng;
    gmp_randinit_default(rng);
    try {
      for (;;) {
        std::uint64_t k = next.fetch_add(1);
        if (k >= chunks) break;
        ChunkResult& cr = results[k];
        gmp_randseed_ui(rng, static_cast<unsigned long>(opt.seed * 0x9E3779B97F4A7C15ULL + k * 0xBF58476D1CE4E5B9ULL));
        const std::uint64_t quota = opt.samples / chunks + (k < opt.samples % chunks ? 1 : 0);
        std::uint64_t attempts = 0;
        std::mt19937_64 walk_rng(opt.seed * 0x9E3779B97F4A7C15ULL + k);
        std::vector<double> cur = start;
        if (walk)
          for (int burn = 0; burn < 100; ++burn) walker.step(cur, walk_rng);
        while (cr.accepted + cr.invalid < quota) {
          ++attempts;
          if (walk) {
            walker.step(cur, walk_rng);
            for (int i = 0; i < n; ++i) mpfr_set_d(xr[i], cur[i], MPFR_RNDN);
            if (opt.rounding.input_rounding) {
              // Perturb below the format precision so the input is a real number.
              for (int i = 0; i < n; ++i) {
                if (mpfr_zero_p(xr[i])) continue;
                mpfr_urandomb(u, rng);
                mpfr_sub_d(u, u, 0.5, MPFR_RNDN);
                mpfr_mul_2si(u, u, mpfr_get_exp(xr[i]) - fprec, MPFR_RNDN);
                mpfr_add(xr[i], xr[i], u, MPFR_RNDN);
              }
              if (!satisfies(spec.constraints, pr, rprec))
                for (int i = 0; i < n; ++i) mpfr_set_d(xr[i], cur[i], MPFR_RNDN);
            }
          } else {
            for (int i = 0; i < n; ++i) {
              mpfr_urandomb(u, rng);
              mpfr_mul_q(xr[i], u, width[i].backend().data(), MPFR_RNDN);
              mpfr_add_q(xr[i], xr[i], spec.box_lo[i].backend().data(), MPFR_RNDN);
              if (!opt.rounding.input_rounding) {
                mpfr_prec_round(xr[i], fprec, MPFR_RNDN);
                mpfr_prec_round(xr[i], rprec, MPFR_RNDN);
              }
            }
          }
          for (int i = 0; i < n; ++i) {
            if (i < static_cast<int>(spec.uncertainties.size()) && spec.uncertainties[i] > 0) {
              mpfr_urandomb(u, rng);
              mpfr_mul_2ui(u, u, 1, MPFR_RNDN);
              mpfr_sub_ui(u, u, 1, MPFR_RNDN);
              mpfr_mul_q(u, u, spec.uncertainties[i].backend().data(), MPFR_RNDN);
              mpfr_add_ui(u, u, 1, MPFR_RNDN);
              mpfr_mul(xf[i], xr[i], u, MPFR_RNDN);
            } else {
              mpfr_set(xf[i], xr[i], MPFR_RNDN);
            }
          }
          if (!walk && attempts >= 10000 && static_cast<double>(cr.accepted + cr.invalid) / attempts < 1e-4)
            throw RejectionSamplingStarved(static_cast<double>(cr.accepted + cr.invalid) / attempts);
          if (!satisfies(spec.constraints, pr, rprec)) {
            ++cr.rejected;
            continue;
          }
          if (!fexec.run(pf, outf) || !rexec.run(pr, outr)) {
            ++cr.invalid;
            continue;
          }
          ++cr.accepted;
          mpfr_sub(diff, outf, outr, MPFR_RNDN);
          mpfr_abs(diff, diff, MPFR_RNDN);
          double d = mpfr_get_d(diff, MPFR_RNDU);
          if (d > cr.max_error) {
            cr.max_error = d;
            cr.argmax.assign(n, 0);
            for (int i = 0; i < n; ++i) cr.argmax[i] = mpfr_get_d(xr[i], MPFR_RNDN);
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(chunks);
    }
    gmp_randclear(rng);
    mpfr_clears(u, outf, outr, diff, static_cast<mpfr_ptr>(nullptr));
    for (int i = 0; i < slots; ++i) {
      mpfr_clear(xr[i]);
      mpfr_clear(xf[i]);
    }
  };

  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SampleResult out;
  out.walked = walk;
  for (const auto& cr : results) {
    out.accepted += cr.accepted;
    out.rejected += cr.rejected;
    out.invalid += cr.invalid;
    if (cr.max_error > out.max_error || (out.argmax.empty() && cr.max_error >= 0)) {
      out.max_error = cr.max_error;
      out.argmax = cr.argmax;
    }
  }
  return out;
}

}  // namespace roundoff
