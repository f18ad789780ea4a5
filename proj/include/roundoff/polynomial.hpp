#pragma once

#include "roundoff/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace roundoff {

// Sparse exponent vector: (variable, exponent) pairs sorted by variable, exponents > 0.
class Monomial {
 public:
  using Entry = std::pair<std::uint32_t, std::uint32_t>;

  Monomial() = default;
  static Monomial var(std::uint32_t v, std::uint32_t e = 1);
  static Monomial from_dense(const std::vector<int>& exps);

  const std::vector<Entry>& entries() const { return e_; }
  std::uint32_t exponent(std::uint32_t v) const;
  unsigned degree() const { return deg_; }
  bool is_one() const { return e_.empty(); }
  std::uint32_t max_var() const { return e_.empty() ? 0 : e_.back().first; }

  Monomial operator*(const Monomial& o) const;
  // Exponent of v decreased by one; requires exponent(v) > 0.
  Monomial reduce(std::uint32_t v) const;
  Monomial without(std::uint32_t v) const;
  bool divides(const Monomial& o) const;

  bool operator==(const Monomial& o) const { return e_ == o.e_; }
  bool operator!=(const Monomial& o) const { return e_ != o.e_; }
  std::size_t hash() const;

  std::string str(const std::vector<std::string>& names = {}) const;

 private:
  std::vector<Entry> e_;
  unsigned deg_ = 0;
};

// Graded lexicographic order: lower total degree first, then x1 > x2 > ... among equal degrees.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

class Poly {
 public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  explicit Poly(int nvars = 0) : nvars_(nvars) {}
  static Poly constant(const Rational& c, int nvars = 0);
  static Poly variable(int v, int nvars);
  static Poly monomial(const Monomial& m, const Rational& c, int nvars);

  int nvars() const { return nvars_; }
  void set_nvars(int n) { nvars_ = n; }
  const Terms& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const Rational& c);

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly scale(const Rational& c) const;
  Poly pow(unsigned k) const;

  bool operator==(const Poly& o) const { return t_ == o.t_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly differentiate(int var) const;
  Rational evaluate(const std::vector<Rational>& point) const;
  double evaluate(const std::vector<double>& point) const;

  // Replaces variable i by subs[i] (subs.size() must cover every variable used).
  Poly compose(const std::vector<Poly>& subs, int new_nvars) const;
  // Sets the listed variables to the given values.
  Poly partial_evaluate(const std::map<int, Rational>& values) const;

  unsigned degree() const;
  unsigned degree_in(int var) const;
  std::set<Monomial, GrlexLess> support() const;
  std::set<int> variables() const;
  Rational max_abs_coefficient() const;

  std::string str(const std::vector<std::string>& names = {}) const;

 private:
  int nvars_ = 0;
  Terms t_;
};

struct SupportInfo {
  std::set<Monomial, GrlexLess> support;
  unsigned degree = 0;
  std::set<int> variables;
};

SupportInfo support_and_degree(const Poly& p);

// Number of monomials of degree <= d in n variables, binom(n + d, d).
std::uint64_t binomial(unsigned n, unsigned k);

// All monomials in the given variables with total degree <= d, grlex order.
std::vector<Monomial> monomial_basis(const std::vector<int>& vars, unsigned d);

}  // namespace roundoff
