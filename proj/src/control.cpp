#include "hjbrec/control.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "hjbrec/hermite.hpp"

namespace hjbrec {

double ValueFunction::value(double x) const {
  const int n = this->n();
  std::vector<double> hx(static_cast<std::size_t>(n + 1)), h0(static_cast<std::size_t>(n + 1));
  hermite_eval_all(n, x, hx);
  hermite_eval_all(n, 0.0, h0);
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    sum += v_(i - 1) * (hx[static_cast<std::size_t>(i)] - h0[static_cast<std::size_t>(i)]);
  }
  return sum;
}

double ValueFunction::derivative(double x) const {
  const int n = this->n();
  std::vector<double> h(static_cast<std::size_t>(n + 1));
  hermite_eval_all(n, x, h);
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) sum += v_(i - 1) * 2.0 * i * h[static_cast<std::size_t>(i - 1)];
  return sum;
}

double feedback(const ValueFunction& vf, double x, const ProblemSpec& spec) {
  return -0.5 / spec.R * spec.g(x) * vf.derivative(x);
}

double hjb_residual(const ValueFunction& vf, double x, const ProblemSpec& spec) {
  const double dv = vf.derivative(x);
  const double g = spec.g(x);
  return dv * spec.f(x) + spec.q(x) - 0.25 * dv * g * g / spec.R * dv;
}

Trajectory simulate(const ValueFunction& vf, const ProblemSpec& spec, double x0, double t_end,
                    double dt) {
  if (!(dt > 0.0)) throw UsageError("dt must be positive");
  if (!(t_end >= dt)) throw UsageError("t_end must be at least dt");
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  auto rhs = [&](double x) { return spec.f(x) + spec.g(x) * feedback(vf, x, spec); };
  Trajectory tr;
  tr.dt = dt;
  tr.times.reserve(static_cast<std::size_t>(steps + 1));
  tr.states.reserve(static_cast<std::size_t>(steps + 1));
  tr.inputs.reserve(static_cast<std::size_t>(steps + 1));
  double x = x0;
  for (long s = 0;; ++s) {
    tr.times.push_back(static_cast<double>(s) * dt);
    tr.states.push_back(x);
    tr.inputs.push_back(feedback(vf, x, spec));
    if (!std::isfinite(x) || !std::isfinite(tr.inputs.back())) {
      const std::string msg = "closed loop diverged at t = " + std::to_string(tr.times.back());
      throw DivergenceError(msg, std::move(tr));
    }
    if (s == steps) break;
    const double k1 = rhs(x);
    const double k2 = rhs(x + 0.5 * dt * k1);
    const double k3 = rhs(x + 0.5 * dt * k2);
    const double k4 = rhs(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

double accumulated_cost(const Trajectory& tr, const ProblemSpec& spec) {
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
    const double a = spec.q(tr.states[k]) + spec.R * tr.inputs[k] * tr.inputs[k];
    const double b = spec.q(tr.states[k + 1]) + spec.R * tr.inputs[k + 1] * tr.inputs[k + 1];
    cost += 0.5 * (a + b) * (tr.times[k + 1] - tr.times[k]);
  }
  return cost;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x,u\n" << std::setprecision(17);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << tr.times[k] << ',' << tr.states[k] << ',' << tr.inputs[k] << '\n';
  }
}

void write_scan_csv(std::ostream& os, const std::string& column, double lo, double hi, int points,
                    const std::function<double(double)>& fn) {
  if (points < 2) throw UsageError("a scan needs at least two points");
  os << "x," << column << '\n' << std::setprecision(17);
  for (int k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * k / (points - 1);
    os << x << ',' << fn(x) << '\n';
  }
}

}  // namespace hjbrec
