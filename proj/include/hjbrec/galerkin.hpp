#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hjbrec/integral_table.hpp"

namespace hjbrec {

/// Projected GHJB system. A[k] holds a(., ., k+1), B(i, k) = b(i+1, k+1) and
/// C(k) = c(k+1); basis function m is the Hermite polynomial of degree m+1.
struct GalerkinSystem {
  int n = 0;
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd B;
  Eigen::VectorXd C;
};

/// Copies the tables into matrix form. Throws UsageError on mismatched N,
/// wrong kinds or unset entries.
GalerkinSystem assemble(const IntegralTable& a, const IntegralTable& b, const IntegralTable& c);

/// Component k: v^T (b_k - A_k v_prev / 2) + c_k + v_prev^T A_k v_prev / 4.
Eigen::VectorXd le_residual(const GalerkinSystem& sys, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& v_prev);

/// Solves M v = -(C + q) with row k of M equal to (b_k - A_k v_prev / 2)^T and
/// q_k = v_prev^T A_k v_prev / 4. Partial-pivot LU; a pivot below 1e-12 ||M||
/// throws SingularityError tagged with `iteration`.
Eigen::VectorXd sga_step(const GalerkinSystem& sys, const Eigen::VectorXd& v_prev,
                         int iteration = 0);

struct SgaConfig {
  Eigen::VectorXd v0;
  double eps = 1e-9;
  int l_max = 50;
};

/// v0 with (1 + sqrt 2)/8 in the H_2 slot, zero elsewhere.
Eigen::VectorXd default_initial_guess(int n);

struct SgaResult {
  Eigen::VectorXd v_star;
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm of le_residual after each step
  bool converged = false;
  double initial_residual = 0.0;
};

/// Successive Galerkin approximation: step while max|LE(v, v)| > eps and
/// fewer than l_max steps were taken. Hitting l_max is reported via
/// `converged`, not thrown.
SgaResult sga_run(const GalerkinSystem& sys, const SgaConfig& cfg);

nlohmann::json to_json(const SgaResult& r);
SgaResult sga_result_from_json(const nlohmann::json& j);

}  // namespace hjbrec
