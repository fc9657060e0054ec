#include "hjbrec/operators.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "hjbrec/errors.hpp"

namespace hjbrec {

namespace {

std::vector<std::string> concat(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

int find_name(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

constexpr std::string_view generator_prefix(OpKind kind) {
  return kind == OpKind::Differential ? "D_" : "S_";
}

}  // namespace

template <OpKind Kind>
Operator<Kind>::Operator(std::vector<std::string> vars, std::vector<std::string> params)
    : vars_(std::move(vars)), params_(std::move(params)), coeff_vars_(concat(vars_, params_)) {
  auto sorted = coeff_vars_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("duplicate symbol in operator variable/parameter lists");
  }
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::scalar(std::vector<std::string> vars,
                                      std::vector<std::string> params, const Rational& c) {
  Operator op(std::move(vars), std::move(params));
  op.add_term(Orders(op.vars_.size(), 0), Polynomial::constant(op.coeff_vars_, c));
  return op;
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::coefficient(std::vector<std::string> vars,
                                           std::vector<std::string> params, const Polynomial& p) {
  Operator op(std::move(vars), std::move(params));
  op.add_term(Orders(op.vars_.size(), 0), p.remap(op.coeff_vars_));
  return op;
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::generator(std::vector<std::string> vars,
                                         std::vector<std::string> params, std::string_view name,
                                         int power) {
  Operator op(std::move(vars), std::move(params));
  const int v = find_name(op.vars_, name);
  if (v < 0) throw UsageError("'" + std::string(name) + "' is not an operator variable");
  Orders o(op.vars_.size(), 0);
  o[static_cast<std::size_t>(v)] = power;
  op.add_term(o, Polynomial::constant(op.coeff_vars_, Rational(1)));
  return op;
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::symbol(std::vector<std::string> vars,
                                      std::vector<std::string> params, std::string_view name) {
  Operator op(std::move(vars), std::move(params));
  op.add_term(Orders(op.vars_.size(), 0), Polynomial::variable(op.coeff_vars_, name));
  return op;
}

template <OpKind Kind>
std::size_t Operator<Kind>::monomial_count() const {
  std::size_t n = 0;
  for (const auto& [o, p] : terms_) n += p.terms().size();
  return n;
}

template <OpKind Kind>
void Operator<Kind>::add_term(const Orders& orders, const Polynomial& coeff) {
  if (orders.size() != vars_.size()) throw UsageError("generator order vector length mismatch");
  if (coeff.vars() != coeff_vars_) throw UsageError("coefficient polynomial over wrong variables");
  if constexpr (Kind == OpKind::Differential) {
    if (std::any_of(orders.begin(), orders.end(), [](int x) { return x < 0; })) {
      throw UsageError("negative derivative order");
    }
  }
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(orders, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

template <OpKind Kind>
void Operator<Kind>::add_monomial(const Exponents& pows, const Orders& orders, const Rational& c) {
  Polynomial p(coeff_vars_);
  p.add_term(pows, c);
  add_term(orders, p);
}

template <OpKind Kind>
void Operator<Kind>::check_compatible(const Operator& o) const {
  if (vars_ != o.vars_ || params_ != o.params_) {
    throw UsageError("operators over different variable lists");
  }
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::operator-() const {
  Operator r(vars_, params_);
  for (const auto& [o, p] : terms_) r.terms_.emplace(o, -p);
  return r;
}

template <OpKind Kind>
Operator<Kind>& Operator<Kind>::operator+=(const Operator& o) {
  check_compatible(o);
  for (const auto& [ord, p] : o.terms_) add_term(ord, p);
  return *this;
}

template <OpKind Kind>
Operator<Kind>& Operator<Kind>::operator-=(const Operator& o) {
  check_compatible(o);
  for (const auto& [ord, p] : o.terms_) add_term(ord, -p);
  return *this;
}

template <OpKind Kind>
Operator<Kind>& Operator<Kind>::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [o, p] : terms_) p *= c;
  return *this;
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::multiply(const Operator& a, const Operator& b) {
  a.check_compatible(b);
  Operator r(a.vars_, a.params_);
  const std::size_t n = a.vars_.size();
  for (const auto& [alpha, p] : a.terms_) {
    for (const auto& [beta, q] : b.terms_) {
      if constexpr (Kind == OpKind::Shift) {
        // p S^alpha q S^beta = p q(i + alpha) S^(alpha + beta)
        Polynomial moved = q;
        for (std::size_t v = 0; v < n; ++v) {
          moved = moved.translate(static_cast<int>(v), Rational(alpha[v]));
        }
        Orders sum(n);
        for (std::size_t v = 0; v < n; ++v) sum[v] = alpha[v] + beta[v];
        r.add_term(sum, p * moved);
      } else {
        // Leibniz: d^alpha q = sum_{t <= alpha} prod_v C(alpha_v, t_v) (d^t q) d^(alpha - t)
        Orders t(n, 0);
        while (true) {
          Polynomial dq = q;
          mpz_class weight = 1;
          for (std::size_t v = 0; v < n && !dq.is_zero(); ++v) {
            if (t[v] == 0) continue;
            dq = dq.derivative(static_cast<int>(v), t[v]);
            weight *= binomial(alpha[v], t[v]);
          }
          if (!dq.is_zero()) {
            Orders out(n);
            for (std::size_t v = 0; v < n; ++v) out[v] = alpha[v] - t[v] + beta[v];
            r.add_term(out, (p * dq) * Rational(weight));
          }
          std::size_t v = 0;
          while (v < n && t[v] == alpha[v]) t[v++] = 0;
          if (v == n) break;
          ++t[v];
        }
      }
    }
  }
  return r;
}

template <OpKind Kind>
Operator<Kind> Operator<Kind>::pow(unsigned n) const {
  Operator r = scalar(vars_, params_, Rational(1));
  for (unsigned k = 0; k < n; ++k) r = r * *this;
  return r;
}

template <OpKind Kind>
std::string Operator<Kind>::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [o, p] : terms_) {
    const bool is_identity = std::all_of(o.begin(), o.end(), [](int x) { return x == 0; });
    if (!first) os << " + ";
    first = false;
    const bool unit = p == Polynomial::constant(coeff_vars_, Rational(1));
    if (is_identity) {
      os << "(" << p.str() << ")";
      continue;
    }
    if (!unit) os << "(" << p.str() << ")*";
    bool need_star = false;
    for (std::size_t v = 0; v < o.size(); ++v) {
      if (o[v] == 0) continue;
      if (need_star) os << "*";
      os << generator_prefix(Kind) << vars_[v];
      if (o[v] != 1) os << "^" << (o[v] < 0 ? "(" + std::to_string(o[v]) + ")" : std::to_string(o[v]));
      need_star = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Expression parser
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*' | '/' number | <juxtaposition>) factor)*
//   factor := ['-'] atom ['^' ['-'] integer | '^(' '-'? integer ')']
//   atom   := integer | symbol | generator | '(' expr ')'
//
// Products are formed left to right in the operator ring, so the written order
// of noncommuting factors is respected.

namespace {

template <OpKind Kind>
class Parser {
 public:
  using Op = Operator<Kind>;

  Parser(std::string_view text, const std::vector<std::string>& vars,
         const std::vector<std::string>& params)
      : text_(text), vars_(vars), params_(params) {}

  Op run() {
    Op r = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " in '" + std::string(text_) + "'", pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  mpz_class integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return mpz_class(std::string(text_.substr(start, pos_ - start)), 10);
  }

  int small_integer() {
    const mpz_class z = integer();
    if (!z.fits_sint_p()) fail("exponent too large");
    return static_cast<int>(z.get_si());
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Op scalar(const Rational& c) const { return Op::scalar(vars_, params_, c); }

  Op expr() {
    Op r = Op(vars_, params_);
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Op t = term();
    r += negate ? -t : t;
    while (true) {
      if (accept('+')) {
        r += term();
      } else if (accept('-')) {
        r -= term();
      } else {
        break;
      }
    }
    return r;
  }

  bool starts_factor() {
    const char c = peek();
    return c == '(' || std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Op term() {
    Op r = factor();
    while (true) {
      if (accept('*')) {
        r = r * factor();
      } else if (accept('/')) {
        const mpz_class d = integer();
        if (d == 0) fail("division by zero");
        r *= Rational(mpq_class(1, d));
      } else if (starts_factor()) {
        r = r * factor();
      } else {
        break;
      }
    }
    return r;
  }

  int exponent() {
    if (accept('(')) {
      const bool neg = accept('-');
      const int e = small_integer();
      if (!accept(')')) fail("expected ')'");
      return neg ? -e : e;
    }
    const bool neg = accept('-');
    const int e = small_integer();
    return neg ? -e : e;
  }

  Op factor() {
    if (accept('-')) return -factor();
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Op r = scalar(Rational(integer()));
      if (accept('^')) {
        const int e = exponent();
        if (e < 0) fail("negative power of a scalar");
        r = r.pow(static_cast<unsigned>(e));
      }
      return r;
    }
    if (accept('(')) {
      Op r = expr();
      if (!accept(')')) fail("expected ')'");
      if (accept('^')) {
        const int e = exponent();
        if (e < 0) fail("negative power of a compound factor");
        r = r.pow(static_cast<unsigned>(e));
      }
      return r;
    }
    const std::size_t at = pos_;
    const std::string name = identifier();
    if (name.empty()) fail("expected a factor");
    int power = 1;
    if (accept('^')) power = exponent();
    const auto prefix = generator_prefix(Kind);
    if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0) {
      const std::string var = name.substr(prefix.size());
      if (find_name(vars_, var) < 0) {
        pos_ = at;
        fail("generator of unknown variable '" + var + "'");
      }
      if (Kind == OpKind::Differential && power < 0) fail("negative derivative order");
      return Op::generator(vars_, params_, var, power);
    }
    if (find_name(vars_, name) < 0 && find_name(params_, name) < 0) {
      pos_ = at;
      fail("unknown symbol '" + name + "'");
    }
    if (power < 0) fail("negative power of a symbol");
    return Op::symbol(vars_, params_, name).pow(static_cast<unsigned>(power));
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  const std::vector<std::string>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

template <OpKind Kind>
Operator<Kind> Operator<Kind>::parse(std::string_view text, std::vector<std::string> vars,
                                     std::vector<std::string> params) {
  // Validates the symbol lists before parsing.
  Operator probe(vars, params);
  (void)probe;
  return Parser<Kind>(text, vars, params).run();
}

template class Operator<OpKind::Differential>;
template class Operator<OpKind::Shift>;

DiffOp diff_mul(const DiffOp& a, const DiffOp& b) { return a * b; }
ShiftOp shift_mul(const ShiftOp& a, const ShiftOp& b) { return a * b; }

ShiftOp mellin(const DiffOp& p, const std::vector<std::string>& index_names) {
  const auto& s = p.vars();
  if (index_names.size() != s.size()) {
    throw UsageError("mellin: need one index name per transform variable");
  }
  const auto& params = p.params();
  const std::size_t n = s.size();

  std::vector<ShiftOp> s_image;
  std::vector<ShiftOp> d_image;
  for (std::size_t v = 0; v < n; ++v) {
    s_image.push_back(ShiftOp::generator(index_names, params, index_names[v], 1));
    d_image.push_back(-(ShiftOp::symbol(index_names, params, index_names[v]) *
                        ShiftOp::generator(index_names, params, index_names[v], -1)));
  }

  ShiftOp result(index_names, params);
  const std::size_t np = params.size();
  for (const auto& [alpha, coeff] : p.terms()) {
    ShiftOp derivs = ShiftOp::scalar(index_names, params, Rational(1));
    for (std::size_t v = 0; v < n; ++v) {
      if (alpha[v] != 0) derivs = derivs * d_image[v].pow(static_cast<unsigned>(alpha[v]));
    }
    for (const auto& [pows, c] : coeff.terms()) {
      // Parameters commute with everything and map to themselves.
      Exponents shift_pows(n + np, 0);
      for (std::size_t k = 0; k < np; ++k) shift_pows[n + k] = pows[n + k];
      ShiftOp term(index_names, params);
      term.add_monomial(shift_pows, ShiftOp::Orders(n, 0), c);
      for (std::size_t v = 0; v < n; ++v) {
        if (pows[v] != 0) term = term * s_image[v].pow(static_cast<unsigned>(pows[v]));
      }
      result += term * derivs;
    }
  }
  return result;
}

DiffOp inverse_mellin(const ShiftOp& e, const std::vector<std::string>& var_names) {
  const auto& idx = e.vars();
  if (var_names.size() != idx.size()) {
    throw UsageError("inverse_mellin: need one variable name per shift index");
  }
  const auto& params = e.params();
  const std::size_t n = idx.size();
  const std::size_t np = params.size();

  std::vector<DiffOp> i_image;
  for (std::size_t v = 0; v < n; ++v) {
    // -s d_s - 1
    i_image.push_back(-(DiffOp::symbol(var_names, params, var_names[v]) *
                        DiffOp::generator(var_names, params, var_names[v], 1)) -
                      DiffOp::scalar(var_names, params, Rational(1)));
  }

  DiffOp result(var_names, params);
  for (const auto& [gamma, coeff] : e.terms()) {
    if (std::any_of(gamma.begin(), gamma.end(), [](int g) { return g < 0; })) {
      throw DomainError("inverse_mellin is undefined on operators containing S^-1: " + e.str());
    }
    Exponents s_pows(n + np, 0);
    for (std::size_t v = 0; v < n; ++v) s_pows[v] = gamma[v];
    DiffOp shifts(var_names, params);
    shifts.add_monomial(s_pows, DiffOp::Orders(n, 0), Rational(1));
    for (const auto& [pows, c] : coeff.terms()) {
      Exponents param_pows(n + np, 0);
      for (std::size_t k = 0; k < np; ++k) param_pows[n + k] = pows[n + k];
      DiffOp term(var_names, params);
      term.add_monomial(param_pows, DiffOp::Orders(n, 0), c);
      for (std::size_t v = 0; v < n; ++v) {
        if (pows[v] != 0) term = term * i_image[v].pow(static_cast<unsigned>(pows[v]));
      }
      result += term * shifts;
    }
  }
  return result;
}

namespace {

// Maps an operator coefficient (over vars+params) onto the variables of a
// polynomial operand, substituting bound symbols first.
Polynomial bind_coefficient(const Polynomial& coeff, const std::vector<std::string>& target_vars,
                            const std::map<std::string, Rational>& bindings) {
  Polynomial c = coeff;
  for (const auto& [name, value] : bindings) {
    const int k = c.var_index(name);
    if (k >= 0 && std::find(target_vars.begin(), target_vars.end(), name) == target_vars.end()) {
      c = c.substitute(k, value);
    }
  }
  for (const auto& [e, r] : c.terms()) {
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] != 0 &&
          std::find(target_vars.begin(), target_vars.end(), c.vars()[v]) == target_vars.end()) {
        throw UsageError("unbound symbol '" + c.vars()[v] + "' in operator coefficient");
      }
    }
  }
  return c.remap(target_vars);
}

}  // namespace

Polynomial apply_diff_to_poly(const DiffOp& p, const Polynomial& q,
                              const std::map<std::string, Rational>& bindings) {
  std::vector<int> target;
  for (const auto& v : p.vars()) {
    const int k = q.var_index(v);
    if (k < 0) throw UsageError("operator variable '" + v + "' missing from operand");
    target.push_back(k);
  }
  Polynomial result(q.vars());
  for (const auto& [alpha, coeff] : p.terms()) {
    Polynomial dq = q;
    for (std::size_t v = 0; v < alpha.size(); ++v) {
      if (alpha[v] != 0) dq = dq.derivative(target[v], alpha[v]);
    }
    if (dq.is_zero()) continue;
    result += bind_coefficient(coeff, q.vars(), bindings) * dq;
  }
  return result;
}

Polynomial apply_shift_to_poly(const ShiftOp& e, const Polynomial& f,
                               const std::map<std::string, Rational>& bindings) {
  std::vector<int> target;
  for (const auto& v : e.vars()) {
    const int k = f.var_index(v);
    if (k < 0) throw UsageError("shift index '" + v + "' missing from operand");
    target.push_back(k);
  }
  Polynomial result(f.vars());
  for (const auto& [gamma, coeff] : e.terms()) {
    Polynomial moved = f;
    for (std::size_t v = 0; v < gamma.size(); ++v) {
      moved = moved.translate(target[v], Rational(gamma[v]));
    }
    result += bind_coefficient(coeff, f.vars(), bindings) * moved;
  }
  return result;
}

}  // namespace hjbrec
