#pragma once

// Exact noncommutative operator algebras over Q:
//
//   DiffOp  : Q[x, params]<d_x>        with  d_x x = x d_x + 1
//   ShiftOp : Q[i, params]<S_i, S_i^-1> with  S_i p(i) = p(i+1) S_i
//
// Operators are kept in left normal form: sum over generator monomials
// (d^alpha or S^gamma) of a coefficient polynomial standing to the left.
// Parameters are extra commuting symbols that only appear in coefficients.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hjbrec/polynomial.hpp"

namespace hjbrec {

enum class OpKind { Differential, Shift };

template <OpKind Kind>
class Operator {
 public:
  using Orders = Exponents;
  using TermMap = std::map<Orders, Polynomial, GrlexGreater>;

  Operator() = default;
  explicit Operator(std::vector<std::string> vars, std::vector<std::string> params = {});

  static Operator scalar(std::vector<std::string> vars, std::vector<std::string> params,
                         const Rational& c);
  /// Multiplication by a coefficient polynomial over coeff_vars().
  static Operator coefficient(std::vector<std::string> vars, std::vector<std::string> params,
                              const Polynomial& p);
  /// d_name^power (Differential, power >= 0) or S_name^power (Shift, any sign).
  static Operator generator(std::vector<std::string> vars, std::vector<std::string> params,
                            std::string_view name, int power = 1);
  /// Multiplication by a single variable or parameter symbol.
  static Operator symbol(std::vector<std::string> vars, std::vector<std::string> params,
                         std::string_view name);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<std::string>& params() const { return params_; }
  /// vars() followed by params(): the variable list of every coefficient.
  const std::vector<std::string>& coeff_vars() const { return coeff_vars_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  std::size_t monomial_count() const;

  void add_term(const Orders& orders, const Polynomial& coeff);
  void add_monomial(const Exponents& pows, const Orders& orders, const Rational& c);

  Operator operator-() const;
  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(const Rational& c);
  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, const Rational& c) { return a *= c; }
  friend Operator operator*(const Rational& c, Operator a) { return a *= c; }
  friend Operator operator*(const Operator& a, const Operator& b) { return multiply(a, b); }
  friend bool operator==(const Operator& a, const Operator& b) {
    return a.vars_ == b.vars_ && a.params_ == b.params_ && a.terms_ == b.terms_;
  }

  Operator pow(unsigned n) const;

  /// Human-readable form, e.g. "(2*i + 2)*S_i^2 - 2*x*S_i".
  std::string str() const;

  /// Same operator after the parser, useful for round-trips.
  static Operator parse(std::string_view text, std::vector<std::string> vars,
                        std::vector<std::string> params = {});

 private:
  static Operator multiply(const Operator& a, const Operator& b);
  void check_compatible(const Operator& o) const;

  std::vector<std::string> vars_;
  std::vector<std::string> params_;
  std::vector<std::string> coeff_vars_;
  TermMap terms_;
};

using DiffOp = Operator<OpKind::Differential>;
using ShiftOp = Operator<OpKind::Shift>;

extern template class Operator<OpKind::Differential>;
extern template class Operator<OpKind::Shift>;

DiffOp diff_mul(const DiffOp& a, const DiffOp& b);
ShiftOp shift_mul(const ShiftOp& a, const ShiftOp& b);

/// Mellin transform s_j -> S_{i_j}, d_{s_j} -> -i_j S_{i_j}^-1. `p.vars()` are the
/// transform variables; `index_names` names the resulting shift indices.
ShiftOp mellin(const DiffOp& p, const std::vector<std::string>& index_names);

/// Inverse Mellin transform i_j -> -s_j d_{s_j} - 1, S_{i_j} -> s_j.
/// Throws DomainError if `e` contains a negative shift.
DiffOp inverse_mellin(const ShiftOp& e, const std::vector<std::string>& var_names);

/// p . q for a polynomial q. Operator variables are matched to q's variables
/// by name; parameters must be bound in `bindings` unless q has them as
/// variables (then they act as multiplication).
Polynomial apply_diff_to_poly(const DiffOp& p, const Polynomial& q,
                              const std::map<std::string, Rational>& bindings = {});

/// e . F for a sequence F(i) given as a polynomial in the indices.
Polynomial apply_shift_to_poly(const ShiftOp& e, const Polynomial& f,
                               const std::map<std::string, Rational>& bindings = {});

}  // namespace hjbrec
