#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hjbrec {

/// Scalar plant x' = f(x) + g(x) u with running cost q(x) + R u^2.
struct ProblemSpec {
  std::string label;
  std::function<double(double)> f;
  std::function<double(double)> g;
  std::function<double(double)> q;
  double R = 1.0;
};

/// Throws UsageError unless R > 0 and q >= 0 on the nodes of a 64-point
/// Gauss-Hermite rule.
void validate(const ProblemSpec& spec);

/// Built-in problems:
///   "sin-system"    f = sin x, g = 1, q = x^2/2, R = 1/2
///   "linear-system" f = x,     g = 1, q = x^2/2, R = 1/2  (linearization of the above)
ProblemSpec problem_by_label(std::string_view label);
std::vector<std::string> problem_labels();

}  // namespace hjbrec
