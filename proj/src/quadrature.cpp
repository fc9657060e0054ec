#include "hjbrec/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "hjbrec/errors.hpp"
#include "hjbrec/hermite.hpp"

namespace hjbrec {

namespace {

struct Estimate {
  double value = 0.0;
  double abs_sum = 0.0;  // sum of |w f| over the nodes
};

class Integrand {
 public:
  Integrand(TableKind kind, std::span<const int> idx, const ProblemSpec& spec)
      : kind_(kind), spec_(spec) {
    if (static_cast<int>(idx.size()) != rank_of(kind)) {
      throw UsageError("index rank does not match table kind");
    }
    for (int v : idx) {
      if (v < 1) throw UsageError("Galerkin indices start at 1");
    }
    idx_.assign(idx.begin(), idx.end());
    const int top = *std::max_element(idx_.begin(), idx_.end());
    h_.resize(static_cast<std::size_t>(top + 1));
  }

  double operator()(double x) {
    hermite_eval_all(static_cast<int>(h_.size()) - 1, x, h_);
    switch (kind_) {
      case TableKind::A: {
        const double g = spec_.g(x);
        return dh(idx_[0]) * dh(idx_[1]) * h(idx_[2]) * g * g / spec_.R;
      }
      case TableKind::B:
        return dh(idx_[0]) * spec_.f(x) * h(idx_[1]);
      case TableKind::C:
        return spec_.q(x) * h(idx_[0]);
    }
    return 0.0;
  }

 private:
  double h(int n) const { return h_[static_cast<std::size_t>(n)]; }
  double dh(int n) const { return 2.0 * n * h_[static_cast<std::size_t>(n - 1)]; }

  TableKind kind_;
  const ProblemSpec& spec_;
  std::vector<int> idx_;
  std::vector<double> h_;
};

// Symmetric nodes are summed in +/- pairs so that odd integrands cancel exactly.
Estimate integrate(Integrand& f, const QuadratureRule& rule) {
  Estimate e;
  const std::size_t m = rule.nodes.size();
  for (std::size_t k = 0; k < m / 2; ++k) {
    const std::size_t hi = m - 1 - k;
    const double fp = f(rule.nodes[hi]);
    const double fm = f(rule.nodes[k]);
    e.value += rule.weights[hi] * (fp + fm);
    e.abs_sum += rule.weights[hi] * (std::abs(fp) + std::abs(fm));
  }
  if (m % 2 == 1) {
    const double f0 = f(0.0);
    e.value += rule.weights[m / 2] * f0;
    e.abs_sum += rule.weights[m / 2] * std::abs(f0);
  }
  return e;
}

}  // namespace

double seed_integral(TableKind kind, std::span<const int> idx, const ProblemSpec& spec, int order) {
  if (order < 1) throw UsageError("quadrature order must be at least 1");
  Integrand f(kind, idx, spec);
  int m = order;
  double before = std::numeric_limits<double>::quiet_NaN();
  Estimate prev = integrate(f, cached_gauss_hermite(m));
  while (2 * m <= kMaxQuadratureOrder) {
    m *= 2;
    const Estimate cur = integrate(f, cached_gauss_hermite(m));
    double tol = 1e-12 * std::abs(cur.value);
    if (std::abs(cur.value) < 1e-8) tol = std::max(tol, 1e-12);
    tol = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * cur.abs_sum);
    if (std::abs(cur.value - prev.value) <= tol) return cur.value;
    before = prev.value;
    prev = cur;
  }
  throw NumericalError("quadrature for " + std::string(to_string(kind)) +
                           " did not converge by order " + std::to_string(m),
                       before, prev.value);
}

TimedTable full_table_quadrature(TableKind kind, int n, const ProblemSpec& spec, int order) {
  const auto start = std::chrono::steady_clock::now();
  TimedTable out{IntegralTable(kind, n), 0.0};
  for (std::size_t k = 0; k < out.table.size(); ++k) {
    const Index idx = out.table.index_at(k);
    out.table.set(idx, seed_integral(kind, idx, spec, order), {Provenance::Quadrature});
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hjbrec
