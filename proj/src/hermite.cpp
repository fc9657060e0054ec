#include "hjbrec/hermite.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hjbrec/errors.hpp"

namespace hjbrec {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// Orthonormal Hermite recurrence h(n+1) = (x h(n) - beta(n) h(n-1)) / beta(n+1),
// beta(n) = sqrt(n/2), started from h(0) = 1. Returns h(M) and h'(M) up to a
// common positive scale, which is all Newton needs.
std::pair<double, double> scaled_orthonormal(int order, double x) {
  double h_prev = 0.0, h = 1.0;
  double d_prev = 0.0, d = 0.0;
  for (int n = 0; n < order; ++n) {
    const double beta_n = std::sqrt(0.5 * n);
    const double beta_next = std::sqrt(0.5 * (n + 1));
    const double h_next = (x * h - beta_n * h_prev) / beta_next;
    const double d_next = (h + x * d - beta_n * d_prev) / beta_next;
    h_prev = h;
    h = h_next;
    d_prev = d;
    d = d_next;
    const double big = std::max(std::abs(h), std::abs(d));
    if (big > 1e150) {
      h_prev *= 1e-150;
      h *= 1e-150;
      d_prev *= 1e-150;
      d *= 1e-150;
    }
  }
  return {h, d};
}

// First eigenvector component squared: 1 / sum_{n<M} h(n)^2 with h(0)=1.
double first_component_sq(int order, double x) {
  double h0sq = 1.0;
  double sum = 1.0;
  double h_prev = 0.0, h = 1.0;
  for (int n = 0; n + 1 < order; ++n) {
    const double beta_n = std::sqrt(0.5 * n);
    const double beta_next = std::sqrt(0.5 * (n + 1));
    const double h_next = (x * h - beta_n * h_prev) / beta_next;
    h_prev = h;
    h = h_next;
    sum += h * h;
    if (sum > 1e250) {
      h_prev *= 1e-125;
      h *= 1e-125;
      sum *= 1e-250;
      h0sq *= 1e-250;
    }
  }
  return h0sq / sum;
}

}  // namespace

Polynomial HermitePoly::to_polynomial(const std::string& var) const {
  Polynomial p(std::vector<std::string>{var});
  for (std::size_t d = 0; d < coefficients.size(); ++d) {
    p.add_term({static_cast<int>(d)}, Rational(coefficients[d]));
  }
  return p;
}

HermitePoly hermite_poly(int degree) {
  if (degree < 0) throw UsageError("Hermite degree must be nonnegative");
  std::vector<mpz_class> prev{1};
  if (degree == 0) return {0, prev};
  std::vector<mpz_class> cur{0, 2};
  for (int n = 1; n < degree; ++n) {
    std::vector<mpz_class> next(static_cast<std::size_t>(n + 2), 0);
    for (std::size_t d = 0; d < cur.size(); ++d) next[d + 1] += 2 * cur[d];
    for (std::size_t d = 0; d < prev.size(); ++d) next[d] -= 2 * n * prev[d];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {degree, cur};
}

double hermite_eval(int i, double x) {
  if (i == 0) return 1.0;
  double prev = 1.0, cur = 2.0 * x;
  for (int n = 1; n < i; ++n) {
    const double next = 2.0 * x * cur - 2.0 * n * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_deriv_eval(int i, double x) {
  return i == 0 ? 0.0 : 2.0 * i * hermite_eval(i - 1, x);
}

void hermite_eval_all(int max_degree, double x, std::span<double> out) {
  if (out.size() < static_cast<std::size_t>(max_degree + 1)) {
    throw UsageError("hermite_eval_all: output span too small");
  }
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = 2.0 * x;
  for (int n = 1; n < max_degree; ++n) {
    out[static_cast<std::size_t>(n + 1)] =
        2.0 * x * out[static_cast<std::size_t>(n)] - 2.0 * n * out[static_cast<std::size_t>(n - 1)];
  }
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw UsageError("quadrature order must be at least 1");
  QuadratureRule rule;
  rule.order = order;
  const auto m = static_cast<std::size_t>(order);
  rule.nodes.assign(m, 0.0);
  rule.weights.assign(m, 0.0);
  if (order == 1) {
    rule.weights[0] = kSqrtPi;
    return rule;
  }

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int n = 1; n < order; ++n) sub(n - 1) = std::sqrt(0.5 * n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Jacobi matrix eigensolver failed", 0.0, 0.0);
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();

  // Mirror the positive half so the rule is exactly symmetric, then polish
  // each positive node with Newton on the orthonormal recurrence.
  for (std::size_t k = 0; k < m / 2; ++k) {
    double x = 0.5 * (lambda(static_cast<Eigen::Index>(m - 1 - k)) -
                      lambda(static_cast<Eigen::Index>(k)));
    for (int it = 0; it < 3; ++it) {
      const auto [h, d] = scaled_orthonormal(order, x);
      if (d == 0.0) break;
      const double step = h / d;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    rule.nodes[m - 1 - k] = x;
    rule.nodes[k] = -x;
  }
  for (std::size_t k = 0; k < m / 2; ++k) {
    const double w = kSqrtPi * first_component_sq(order, rule.nodes[m - 1 - k]);
    rule.weights[k] = w;
    rule.weights[m - 1 - k] = w;
  }
  if (m % 2 == 1) rule.weights[m / 2] = kSqrtPi * first_component_sq(order, 0.0);
  return rule;
}

const QuadratureRule& cached_gauss_hermite(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const QuadratureRule>(gauss_hermite(order));
  return *slot;
}

}  // namespace hjbrec
