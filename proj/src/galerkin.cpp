#include "hjbrec/galerkin.hpp"

#include <cmath>
#include <limits>

#include "hjbrec/errors.hpp"

namespace hjbrec {

namespace {

void require_full(const IntegralTable& t, TableKind kind) {
  if (t.kind() != kind) {
    throw UsageError("expected a " + std::string(to_string(kind)) + "-table, got " +
                     std::string(to_string(t.kind())));
  }
  if (t.counts().unset != 0) {
    throw UsageError(std::string(to_string(kind)) + "-table has unset entries");
  }
}

void check_dims(const GalerkinSystem& sys, const Eigen::VectorXd& v) {
  if (v.size() != sys.n) {
    throw UsageError("vector of length " + std::to_string(v.size()) + " for a system of size " +
                     std::to_string(sys.n));
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double pow2_inverse(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) return 1.0;
  int e = 0;
  std::frexp(m, &e);
  return std::ldexp(1.0, -e);
}

}  // namespace

GalerkinSystem assemble(const IntegralTable& a, const IntegralTable& b, const IntegralTable& c) {
  require_full(a, TableKind::A);
  require_full(b, TableKind::B);
  require_full(c, TableKind::C);
  if (a.n() != b.n() || a.n() != c.n()) {
    throw UsageError("tables disagree on N: a=" + std::to_string(a.n()) + " b=" +
                     std::to_string(b.n()) + " c=" + std::to_string(c.n()));
  }
  GalerkinSystem sys;
  const int n = a.n();
  sys.n = n;
  sys.A.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  sys.B = Eigen::MatrixXd::Zero(n, n);
  sys.C = Eigen::VectorXd::Zero(n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        const int idx[] = {i, j, k};
        sys.A[static_cast<std::size_t>(k - 1)](i - 1, j - 1) = a.at(idx);
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int k = 1; k <= n; ++k) {
      const int idx[] = {i, k};
      sys.B(i - 1, k - 1) = b.at(idx);
    }
  }
  for (int k = 1; k <= n; ++k) {
    const int idx[] = {k};
    sys.C(k - 1) = c.at(idx);
  }
  return sys;
}

Eigen::VectorXd le_residual(const GalerkinSystem& sys, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& v_prev) {
  check_dims(sys, v);
  check_dims(sys, v_prev);
  Eigen::VectorXd r(sys.n);
  for (int k = 0; k < sys.n; ++k) {
    const auto& Ak = sys.A[static_cast<std::size_t>(k)];
    const Eigen::VectorXd Av = Ak * v_prev;
    r(k) = v.dot(sys.B.col(k) - 0.5 * Av) + sys.C(k) + 0.25 * v_prev.dot(Av);
  }
  return r;
}

Eigen::VectorXd sga_step(const GalerkinSystem& sys, const Eigen::VectorXd& v_prev, int iteration) {
  check_dims(sys, v_prev);
  const int n = sys.n;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd Av = sys.A[static_cast<std::size_t>(k)] * v_prev;
    M.row(k) = (sys.B.col(k) - 0.5 * Av).transpose();
    rhs(k) = -(sys.C(k) + 0.25 * v_prev.dot(Av));
  }
  // Power-of-two row and column equilibration: the Hermite basis spreads
  // magnitudes over many decades and the scaling itself is exact.
  Eigen::VectorXd rs = Eigen::VectorXd::Ones(n), cs = Eigen::VectorXd::Ones(n);
  for (int k = 0; k < n; ++k) rs(k) = pow2_inverse(M.row(k).cwiseAbs().maxCoeff());
  M = rs.asDiagonal() * M;
  for (int k = 0; k < n; ++k) cs(k) = pow2_inverse(M.col(k).cwiseAbs().maxCoeff());
  M = M * cs.asDiagonal();
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(norm > 0.0) || !(min_pivot >= 1e-12 * norm)) {
    throw SingularityError("Galerkin matrix is singular at iteration " + std::to_string(iteration) +
                               " (relative pivot " + std::to_string(min_pivot / norm) + ")",
                           iteration);
  }
  return cs.asDiagonal() * lu.solve(rs.asDiagonal() * rhs);
}

Eigen::VectorXd default_initial_guess(int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (n >= 2) v(1) = (1.0 + std::sqrt(2.0)) / 8.0;
  return v;
}

SgaResult sga_run(const GalerkinSystem& sys, const SgaConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw UsageError("eps must be positive");
  if (cfg.l_max < 1) throw UsageError("l_max must be at least 1");
  check_dims(sys, cfg.v0);
  SgaResult r;
  r.v_star = cfg.v0;
  double res = le_residual(sys, r.v_star, r.v_star).cwiseAbs().maxCoeff();
  r.initial_residual = res;
  while (res > cfg.eps && r.iterations < cfg.l_max) {
    try {
      r.v_star = sga_step(sys, r.v_star, r.iterations + 1);
    } catch (const SingularityError& ex) {
      throw SingularityError(ex.what(), ex.iteration(), r.residual_history);
    }
    ++r.iterations;
    res = le_residual(sys, r.v_star, r.v_star).cwiseAbs().maxCoeff();
    r.residual_history.push_back(res);
    if (!std::isfinite(res)) break;
  }
  r.converged = res <= cfg.eps;
  return r;
}

nlohmann::json to_json(const SgaResult& r) {
  return nlohmann::json{{"N", r.v_star.size()},
                        {"v_star", to_vector(r.v_star)},
                        {"iterations", r.iterations},
                        {"converged", r.converged},
                        {"initial_residual", r.initial_residual},
                        {"residual_history", r.residual_history}};
}

SgaResult sga_result_from_json(const nlohmann::json& j) {
  try {
    SgaResult r;
    const auto v = j.at("v_star").get<std::vector<double>>();
    r.v_star = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.initial_residual = j.value("initial_residual", std::numeric_limits<double>::quiet_NaN());
    r.residual_history = j.at("residual_history").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("SGA result JSON: ") + ex.what(), 0);
  }
}

}  // namespace hjbrec
