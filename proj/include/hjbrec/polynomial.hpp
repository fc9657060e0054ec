#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hjbrec/rational.hpp"

namespace hjbrec {

using Exponents = std::vector<int>;

/// Graded lexicographic order, largest first. Degrees count |e| so that
/// negative shift exponents order consistently too.
struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Commutative multivariate polynomial with exact rational coefficients.
/// The variable list is fixed at construction; arithmetic requires equal lists.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, Rational, GrlexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial constant(std::vector<std::string> vars, const Rational& c);
  static Polynomial variable(std::vector<std::string> vars, std::string_view name);

  const std::vector<std::string>& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  /// Coefficient of the given monomial (zero when absent).
  Rational coefficient(const Exponents& e) const;

  /// Index of `name` in vars(), or -1.
  int var_index(std::string_view name) const;

  void add_term(const Exponents& e, const Rational& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  /// Multiplies by the monomial x^e.
  Polynomial shifted_by_monomial(const Exponents& e) const;

  /// `order`-th partial derivative with respect to variable `var`.
  Polynomial derivative(int var, int order = 1) const;

  /// p(.., x_var + delta, ..).
  Polynomial translate(int var, const Rational& delta) const;

  /// Replaces variable `var` by the constant `value`; the variable list is kept.
  Polynomial substitute(int var, const Rational& value) const;

  /// Re-expresses the polynomial over `new_vars`. Every variable that occurs
  /// with a nonzero exponent must be present in `new_vars`.
  Polynomial remap(const std::vector<std::string>& new_vars) const;

  Rational evaluate(std::span<const Rational> point) const;
  double evaluate(std::span<const double> point) const;

  std::string str() const;

 private:
  void check_same_vars(const Polynomial& o) const;

  std::vector<std::string> vars_;
  TermMap terms_;
};

/// Binomial coefficient C(n, k) for 0 <= k <= n.
mpz_class binomial(int n, int k);

/// n! / (n - k)!, i.e. the coefficient of x^(n-k) in d^k/dx^k x^n.
mpz_class falling_factorial(int n, int k);

}  // namespace hjbrec
