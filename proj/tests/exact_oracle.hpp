#pragma once
// Exact table entries for the sin-system. Polynomial Gaussian integrals are
// sqrt(pi) times a rational; with sin x the integral is the imaginary part of
// a Gaussian with mean i/2, giving sqrt(pi) e^(-1/4) times a rational.
#include <gmpxx.h>

#include <cmath>
#include <vector>

namespace exact {

inline std::vector<mpz_class> hermite(int n) {
  std::vector<mpz_class> h0{1}, h1{0, 2};
  if (n == 0) return h0;
  for (int m = 1; m < n; ++m) {
    std::vector<mpz_class> h2(static_cast<std::size_t>(m + 2), 0);
    for (std::size_t d = 0; d < h1.size(); ++d) h2[d + 1] += 2 * h1[d];
    for (std::size_t d = 0; d < h0.size(); ++d) h2[d] -= 2 * m * h0[d];
    h0 = std::move(h1);
    h1 = std::move(h2);
  }
  return h1;
}

inline std::vector<mpz_class> dhermite(int n) {
  std::vector<mpz_class> h = hermite(n), d(h.size() > 1 ? h.size() - 1 : 1, 0);
  for (std::size_t k = 1; k < h.size(); ++k) d[k - 1] = h[k] * static_cast<unsigned long>(k);
  return d;
}

inline std::vector<mpz_class> mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::vector<mpz_class> r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Integral of x^n e^(-x^2) divided by sqrt(pi).
inline mpq_class moment(int n) {
  if (n % 2 == 1) return 0;
  mpq_class v = 1;
  for (int k = 1; k < n; k += 2) v *= mpq_class(k, 2);
  return v;
}

inline mpq_class pair(const std::vector<mpz_class>& p) {
  mpq_class s = 0;
  for (std::size_t n = 0; n < p.size(); ++n) s += p[n] * moment(static_cast<int>(n));
  return s;
}

/// a(i,j,k) / sqrt(pi), with g^2/R = 2.
inline mpq_class a(int i, int j, int k) { return 2 * pair(mul(mul(dhermite(i), dhermite(j)), hermite(k))); }

/// c(k) / sqrt(pi), q = x^2/2.
inline mpq_class c(int k) { return pair(mul({0, 0, 1}, hermite(k))) / 2; }

/// b(i,k) / (sqrt(pi) e^(-1/4)).
inline mpq_class b(int i, int k) {
  const auto p = mul(dhermite(i), hermite(k));
  // Moments of exp(-(x - i/2)^2)/sqrt(pi): m(n+1) = (i/2) m(n) + (n/2) m(n-1).
  std::vector<mpq_class> re{1}, im{0};
  re.push_back(0);
  im.push_back(mpq_class(1, 2));
  for (std::size_t n = 1; n + 1 < p.size(); ++n) {
    re.push_back(-im[n] / 2 + re[n - 1] * mpq_class(static_cast<long>(n), 2));
    im.push_back(re[n] / 2 + im[n - 1] * mpq_class(static_cast<long>(n), 2));
  }
  mpq_class s = 0;
  for (std::size_t n = 0; n < p.size(); ++n) s += p[n] * im[n];
  return s;
}

inline double to_double(const mpq_class& q, long double factor) {
  return static_cast<double>(static_cast<long double>(q.get_d()) * factor);
}

inline const long double kSqrtPi = std::sqrt(3.14159265358979323846264338327950288L);

inline double a_value(int i, int j, int k) { return to_double(a(i, j, k), kSqrtPi); }
inline double b_value(int i, int k) { return to_double(b(i, k), kSqrtPi * std::exp(-0.25L)); }
inline double c_value(int k) { return to_double(c(k), kSqrtPi); }

}  // namespace exact
