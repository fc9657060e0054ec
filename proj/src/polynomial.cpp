#include "hjbrec/polynomial.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "hjbrec/errors.hpp"

namespace hjbrec {

namespace {

int abs_degree(const Exponents& e) {
  int d = 0;
  for (int x : e) d += std::abs(x);
  return d;
}

}  // namespace

bool GrlexGreater::operator()(const Exponents& a, const Exponents& b) const {
  const int da = abs_degree(a);
  const int db = abs_degree(b);
  if (da != db) return da > db;
  return a > b;
}

mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

mpz_class falling_factorial(int n, int k) {
  mpz_class r = 1;
  for (int t = 0; t < k; ++t) r *= (n - t);
  return r;
}

Polynomial Polynomial::constant(std::vector<std::string> vars, const Rational& c) {
  Polynomial p(std::move(vars));
  p.add_term(Exponents(p.vars_.size(), 0), c);
  return p;
}

Polynomial Polynomial::variable(std::vector<std::string> vars, std::string_view name) {
  Polynomial p(std::move(vars));
  const int idx = p.var_index(name);
  if (idx < 0) throw UsageError("unknown variable '" + std::string(name) + "'");
  Exponents e(p.vars_.size(), 0);
  e[static_cast<std::size_t>(idx)] = 1;
  p.add_term(e, Rational(1));
  return p;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

int Polynomial::var_index(std::string_view name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (e.size() != vars_.size()) throw UsageError("exponent vector length mismatch");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void Polynomial::check_same_vars(const Polynomial& o) const {
  if (vars_ != o.vars_) throw UsageError("polynomial variable lists differ");
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_vars(b);
  Polynomial r(a.vars_);
  Exponents e(a.vars_.size());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::shifted_by_monomial(const Exponents& e) const {
  if (e.size() != vars_.size()) throw UsageError("exponent vector length mismatch");
  Polynomial r(vars_);
  for (const auto& [ea, c] : terms_) {
    Exponents s = ea;
    for (std::size_t v = 0; v < s.size(); ++v) s[v] += e[v];
    r.terms_.emplace(std::move(s), c);
  }
  return r;
}

Polynomial Polynomial::derivative(int var, int order) const {
  Polynomial r(vars_);
  const auto v = static_cast<std::size_t>(var);
  for (const auto& [e, c] : terms_) {
    if (e[v] < order) continue;
    Exponents d = e;
    d[v] -= order;
    r.add_term(d, c * Rational(falling_factorial(e[v], order)));
  }
  return r;
}

Polynomial Polynomial::translate(int var, const Rational& delta) const {
  if (delta.is_zero()) return *this;
  Polynomial r(vars_);
  const auto v = static_cast<std::size_t>(var);
  for (const auto& [e, c] : terms_) {
    // (x + d)^n = sum_t C(n,t) d^(n-t) x^t
    const int n = e[v];
    Exponents d = e;
    for (int t = 0; t <= n; ++t) {
      d[v] = t;
      r.add_term(d, c * Rational(binomial(n, t)) * pow(delta, static_cast<unsigned>(n - t)));
    }
  }
  return r;
}

Polynomial Polynomial::substitute(int var, const Rational& value) const {
  Polynomial r(vars_);
  const auto v = static_cast<std::size_t>(var);
  for (const auto& [e, c] : terms_) {
    Exponents d = e;
    d[v] = 0;
    r.add_term(d, c * pow(value, static_cast<unsigned>(e[v])));
  }
  return r;
}

Polynomial Polynomial::remap(const std::vector<std::string>& new_vars) const {
  std::vector<int> target(vars_.size(), -1);
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    auto it = std::find(new_vars.begin(), new_vars.end(), vars_[v]);
    if (it != new_vars.end()) target[v] = static_cast<int>(it - new_vars.begin());
  }
  Polynomial r(new_vars);
  for (const auto& [e, c] : terms_) {
    Exponents d(new_vars.size(), 0);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (target[v] < 0) throw UsageError("variable '" + vars_[v] + "' has no counterpart");
      d[static_cast<std::size_t>(target[v])] += e[v];
    }
    r.add_term(d, c);
  }
  return r;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != vars_.size()) throw UsageError("evaluation point has wrong dimension");
  Rational sum(0);
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] != 0) t *= pow(point[v], static_cast<unsigned>(e[v]));
    }
    sum += t;
  }
  return sum;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != vars_.size()) throw UsageError("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.to_double();
    for (std::size_t v = 0; v < e.size(); ++v) {
      for (int p = 0; p < e[v]; ++p) t *= point[v];
    }
    sum += t;
  }
  return sum;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    const bool is_const = std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
    Rational mag = c.sign() < 0 ? -c : c;
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (is_const || mag != Rational(1)) {
      os << mag;
      need_star = true;
    }
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (need_star) os << "*";
      os << vars_[v];
      if (e[v] != 1) os << "^" << e[v];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace hjbrec
