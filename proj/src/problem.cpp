#include "hjbrec/problem.hpp"

#include <cmath>

#include "hjbrec/errors.hpp"
#include "hjbrec/hermite.hpp"

namespace hjbrec {

void validate(const ProblemSpec& spec) {
  if (!spec.f || !spec.g || !spec.q) throw UsageError("problem '" + spec.label + "' is incomplete");
  if (!(spec.R > 0.0)) throw UsageError("problem '" + spec.label + "': R must be positive");
  for (double x : cached_gauss_hermite(64).nodes) {
    if (spec.q(x) < 0.0) {
      throw UsageError("problem '" + spec.label + "': q is negative at x = " + std::to_string(x));
    }
  }
}

ProblemSpec problem_by_label(std::string_view label) {
  const auto half_square = [](double x) { return 0.5 * x * x; };
  const auto one = [](double) { return 1.0; };
  if (label == "sin-system") {
    return {"sin-system", [](double x) { return std::sin(x); }, one, half_square, 0.5};
  }
  if (label == "linear-system") {
    return {"linear-system", [](double x) { return x; }, one, half_square, 0.5};
  }
  throw UsageError("unknown problem label '" + std::string(label) + "'");
}

std::vector<std::string> problem_labels() { return {"sin-system", "linear-system"}; }

}  // namespace hjbrec
