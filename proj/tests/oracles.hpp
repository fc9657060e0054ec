#pragma once
// Reference values computed without the library: long double Hermite
// recurrence, trapezoid rule on a wide interval (spectrally accurate for
// Gaussian-damped analytic integrands) and closed-form Gaussian moments.
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline long double hermite(int n, long double x) {
  long double h0 = 1.0L, h1 = 2.0L * x;
  if (n == 0) return h0;
  for (int m = 1; m < n; ++m) {
    const long double h2 = 2.0L * x * h1 - 2.0L * m * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

inline long double dhermite(int n, long double x) { return n == 0 ? 0.0L : 2.0L * n * hermite(n - 1, x); }

/// Integral of f(x) exp(-x^2) over the real line.
inline long double gauss_integral(const std::function<long double(long double)>& f,
                                  long double half_width = 16.0L, int steps = 12800) {
  const long double h = 2.0L * half_width / steps;
  long double sum = 0.0L;
  for (int s = 0; s <= steps; ++s) {
    const long double x = -half_width + s * h;
    const long double w = (s == 0 || s == steps) ? 0.5L : 1.0L;
    sum += w * f(x) * std::exp(-x * x);
  }
  return sum * h;
}

/// Integral of x^n exp(-x^2): zero for odd n, (n-1)!! sqrt(pi) / 2^(n/2) for even n.
inline long double gaussian_moment(int n) {
  if (n % 2 == 1) return 0.0L;
  long double v = std::sqrt(3.14159265358979323846264338327950288L);
  for (int k = 1; k < n; k += 2) v *= k / 2.0L;
  return v;
}

// Entries for x' = sin x + u, q = x^2/2, R = 1/2 (g = 1, so g^2/R = 2).
inline long double sin_a(int i, int j, int k) {
  return gauss_integral([=](long double x) { return 2.0L * dhermite(i, x) * dhermite(j, x) * hermite(k, x); });
}
inline long double sin_b(int i, int k) {
  return gauss_integral([=](long double x) { return dhermite(i, x) * std::sin(x) * hermite(k, x); });
}
inline long double sin_c(int k) {
  return gauss_integral([=](long double x) { return 0.5L * x * x * hermite(k, x); });
}

inline const long double kSqrtPi = std::sqrt(3.14159265358979323846264338327950288L);

}  // namespace oracle
