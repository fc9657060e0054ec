#pragma once

#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hjbrec/polynomial.hpp"

namespace hjbrec {

/// Physicists' Hermite polynomial H(degree; x) with exact integer coefficients
/// in ascending powers.
struct HermitePoly {
  int degree = 0;
  std::vector<mpz_class> coefficients;

  Polynomial to_polynomial(const std::string& var = "x") const;
};

/// Built from H(0)=1, H(1)=2x, H(n+1) = 2x H(n) - 2n H(n-1).
HermitePoly hermite_poly(int degree);

/// H(i; x) by forward three-term recurrence.
double hermite_eval(int i, double x);

/// dH(i; x)/dx = 2i H(i-1; x); zero for i = 0.
double hermite_deriv_eval(int i, double x);

/// Fills out[0..max_degree] with H(0..max_degree; x).
void hermite_eval_all(int max_degree, double x, std::span<double> out);

/// Gauss rule for the weight exp(-x^2) on the real line.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // ascending, exactly symmetric about 0
  std::vector<double> weights;  // weights[m] belongs to nodes[m]
};

/// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal Jacobi
/// matrix of the Hermite recurrence, weights sqrt(pi) v0^2 from the normalized
/// eigenvectors. Throws UsageError for order < 1.
QuadratureRule gauss_hermite(int order);

/// Shared, lazily built rules. Thread-safe; returned references stay valid
/// for the lifetime of the process.
const QuadratureRule& cached_gauss_hermite(int order);

}  // namespace hjbrec
