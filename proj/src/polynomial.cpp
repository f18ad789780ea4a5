#include "roundoff/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roundoff {

Monomial Monomial::var(std::uint32_t v, std::uint32_t e) {
  Monomial m;
  if (e > 0) {
    m.e_.push_back({v, e});
    m.deg_ = e;
  }
  return m;
}

Monomial Monomial::from_dense(const std::vector<int>& exps) {
  Monomial m;
  for (std::size_t i = 0; i < exps.size(); ++i)
    if (exps[i] > 0) {
      m.e_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(exps[i])});
      m.deg_ += exps[i];
    }
  return m;
}

std::uint32_t Monomial::exponent(std::uint32_t v) const {
  for (const auto& [var, e] : e_)
    if (var == v) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.e_.reserve(e_.size() + o.e_.size());
  std::size_t i = 0, j = 0;
  while (i < e_.size() || j < o.e_.size()) {
    if (j == o.e_.size() || (i < e_.size() && e_[i].first < o.e_[j].first)) {
      r.e_.push_back(e_[i++]);
    } else if (i == e_.size() || o.e_[j].first < e_[i].first) {
      r.e_.push_back(o.e_[j++]);
    } else {
      r.e_.push_back({e_[i].first, e_[i].second + o.e_[j].second});
      ++i;
      ++j;
    }
  }
  r.deg_ = deg_ + o.deg_;
  return r;
}

Monomial Monomial::reduce(std::uint32_t v) const {
  Monomial r = *this;
  for (auto it = r.e_.begin(); it != r.e_.end(); ++it)
    if (it->first == v) {
      if (--it->second == 0) r.e_.erase(it);
      --r.deg_;
      break;
    }
  return r;
}

Monomial Monomial::without(std::uint32_t v) const {
  Monomial r;
  for (const auto& en : e_)
    if (en.first != v) {
      r.e_.push_back(en);
      r.deg_ += en.second;
    }
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  for (const auto& [v, e] : e_)
    if (o.exponent(v) < e) return false;
  return true;
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ULL;
  for (const auto& [v, e] : e_) {
    h ^= (static_cast<std::size_t>(v) << 20) ^ e;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Monomial::str(const std::vector<std::string>& names) const {
  if (e_.empty()) return "1";
  std::string s;
  for (const auto& [v, e] : e_) {
    if (!s.empty()) s += "*";
    s += v < names.size() ? names[v] : "x" + std::to_string(v + 1);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t n = std::min(ea.size(), eb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (ea[i].first != eb[i].first) return ea[i].first > eb[i].first;
    if (ea[i].second != eb[i].second) return ea[i].second < eb[i].second;
  }
  return ea.size() < eb.size();
}

Poly Poly::constant(const Rational& c, int nvars) {
  Poly p(nvars);
  p.add_term(Monomial(), c);
  return p;
}

Poly Poly::variable(int v, int nvars) {
  Poly p(std::max(nvars, v + 1));
  p.add_term(Monomial::var(v), 1);
  return p;
}

Poly Poly::monomial(const Monomial& m, const Rational& c, int nvars) {
  Poly p(nvars);
  p.add_term(m, c);
  return p;
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }

Rational Poly::constant_term() const { return coefficient(Monomial()); }

Rational Poly::coefficient(const Monomial& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  if (!m.is_one() && static_cast<int>(m.max_var()) + 1 > nvars_) nvars_ = m.max_var() + 1;
  auto [it, inserted] = t_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  nvars_ = std::max(nvars_, o.nvars_);
  for (const auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  nvars_ = std::max(nvars_, o.nvars_);
  for (const auto& [m, c] : o.t_) add_term(m, -c);
  return *this;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r(std::max(nvars_, o.nvars_));
  for (const auto& [ma, ca] : t_)
    for (const auto& [mb, cb] : o.t_) r.add_term(ma * mb, ca * cb);
  return r;
}

Poly Poly::operator-() const {
  Poly r(nvars_);
  for (const auto& [m, c] : t_) r.t_.emplace_hint(r.t_.end(), m, -c);
  return r;
}

Poly Poly::scale(const Rational& c) const {
  Poly r(nvars_);
  if (c == 0) return r;
  for (const auto& [m, k] : t_) r.t_.emplace_hint(r.t_.end(), m, k * c);
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly result = constant(1, nvars_);
  Poly base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Poly Poly::differentiate(int var) const {
  Poly r(nvars_);
  for (const auto& [m, c] : t_) {
    std::uint32_t e = m.exponent(var);
    if (e == 0) continue;
    r.add_term(m.reduce(var), c * e);
  }
  return r;
}

Rational Poly::evaluate(const std::vector<Rational>& point) const {
  Rational sum = 0;
  for (const auto& [m, c] : t_) {
    Rational term = c;
    for (const auto& [v, e] : m.entries()) {
      Rational p = 1;
      for (std::uint32_t k = 0; k < e; ++k) p *= point.at(v);
      term *= p;
    }
    sum += term;
  }
  return sum;
}

double Poly::evaluate(const std::vector<double>& point) const {
  double sum = 0;
  for (const auto& [m, c] : t_) {
    double term = to_double(c);
    for (const auto& [v, e] : m.entries()) term *= std::pow(point.at(v), static_cast<int>(e));
    sum += term;
  }
  return sum;
}

Poly Poly::compose(const std::vector<Poly>& subs, int new_nvars) const {
  // cache powers per variable
  std::map<std::pair<std::uint32_t, std::uint32_t>, Poly> powers;
  std::function<const Poly&(std::uint32_t, std::uint32_t)> power = [&](std::uint32_t v,
                                                                       std::uint32_t e) -> const Poly& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    Poly p = e == 1 ? subs.at(v) : power(v, e - 1) * subs.at(v);
    return powers.emplace(key, std::move(p)).first->second;
  };
  Poly r(new_nvars);
  for (const auto& [m, c] : t_) {
    Poly term = Poly::constant(c, new_nvars);
    for (const auto& [v, e] : m.entries()) term = term * power(v, e);
    r += term;
  }
  r.nvars_ = new_nvars;
  return r;
}

Poly Poly::partial_evaluate(const std::map<int, Rational>& values) const {
  Poly r(nvars_);
  for (const auto& [m, c] : t_) {
    Rational coef = c;
    Monomial rest;
    for (const auto& [v, e] : m.entries()) {
      auto it = values.find(static_cast<int>(v));
      if (it == values.end()) {
        rest = rest * Monomial::var(v, e);
      } else {
        Rational p = 1;
        for (std::uint32_t k = 0; k < e; ++k) p *= it->second;
        coef *= p;
      }
    }
    r.add_term(rest, coef);
  }
  return r;
}

unsigned Poly::degree() const {
  unsigned d = 0;
  for (const auto& kv : t_) d = std::max(d, kv.first.degree());
  return d;
}

unsigned Poly::degree_in(int var) const {
  unsigned d = 0;
  for (const auto& kv : t_) d = std::max<unsigned>(d, kv.first.exponent(var));
  return d;
}

std::set<Monomial, GrlexLess> Poly::support() const {
  std::set<Monomial, GrlexLess> s;
  for (const auto& kv : t_) s.insert(kv.first);
  return s;
}

std::set<int> Poly::variables() const {
  std::set<int> s;
  for (const auto& kv : t_)
    for (const auto& en : kv.first.entries()) s.insert(static_cast<int>(en.first));
  return s;
}

Rational Poly::max_abs_coefficient() const {
  Rational m = 0;
  for (const auto& kv : t_) m = std::max(m, abs(kv.second));
  return m;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : t_) {
    Rational a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (m.is_one()) {
      os << to_string(a);
    } else {
      if (a != 1) os << to_string(a) << "*";
      os << m.str(names);
    }
  }
  return os.str();
}

SupportInfo support_and_degree(const Poly& p) {
  return SupportInfo{p.support(), p.degree(), p.variables()};
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<Monomial> monomial_basis(const std::vector<int>& vars, unsigned d) {
  std::vector<Monomial> out;
  std::vector<int> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  std::function<void(std::size_t, unsigned, Monomial)> rec = [&](std::size_t i, unsigned left, Monomial m) {
    if (i == sorted.size()) {
      out.push_back(m);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) rec(i + 1, left - e, m * Monomial::var(sorted[i], e));
  };
  rec(0, d, Monomial());
  std::sort(out.begin(), out.end(), GrlexLess());
  return out;
}

}  // namespace roundoff
