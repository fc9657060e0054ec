#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hjbrec/errors.hpp"
#include "hjbrec/problem.hpp"

namespace hjbrec {

/// V(x) = sum_i v_i H(i; x), i = 1..N, shifted so that V(0) = 0.
class ValueFunction {
 public:
  explicit ValueFunction(Eigen::VectorXd v) : v_(std::move(v)) {}

  int n() const { return static_cast<int>(v_.size()); }
  const Eigen::VectorXd& coefficients() const { return v_; }

  double value(double x) const;
  /// V'(x) from dH_i/dx = 2i H(i-1; x).
  double derivative(double x) const;

 private:
  Eigen::VectorXd v_;
};

/// u = -(1/2) R^-1 g(x) V'(x).
double feedback(const ValueFunction& vf, double x, const ProblemSpec& spec);

/// V' f + q - (1/4) V' g R^-1 g V'.
double hjb_residual(const ValueFunction& vf, double x, const ProblemSpec& spec);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> inputs;
  double dt = 0.0;
  std::string method = "RK4";
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Classical fixed-step RK4 on x' = f(x) + g(x) u(x) from t = 0 to t_end.
/// Times are k * dt; the last step is t_end rounded to the nearest multiple.
Trajectory simulate(const ValueFunction& vf, const ProblemSpec& spec, double x0, double t_end,
                    double dt);

/// Integral of q(x) + R u^2 along the trajectory (trapezoid rule).
double accumulated_cost(const Trajectory& tr, const ProblemSpec& spec);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
/// Columns x,<column> for x on a uniform grid of `points` samples over [lo, hi].
void write_scan_csv(std::ostream& os, const std::string& column, double lo, double hi, int points,
                    const std::function<double(double)>& fn);

}  // namespace hjbrec
