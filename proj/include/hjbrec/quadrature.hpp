#pragma once

#include <span>

#include "hjbrec/integral_table.hpp"
#include "hjbrec/problem.hpp"

namespace hjbrec {

inline constexpr int kDefaultQuadratureOrder = 32;
inline constexpr int kMaxQuadratureOrder = 2048;

/// One Galerkin integral by Gauss-Hermite quadrature with order doubling,
/// starting at `order`. Two successive estimates must agree to 1e-12 relative
/// (1e-12 absolute below 1e-8); the check never asks for more than the rounding
/// floor of the node sum. Throws NumericalError past kMaxQuadratureOrder.
double seed_integral(TableKind kind, std::span<const int> idx, const ProblemSpec& spec,
                     int order = kDefaultQuadratureOrder);

struct TimedTable {
  IntegralTable table;
  double seconds = 0.0;
};

/// Every entry of the N-table by seed_integral, tagged Provenance::Quadrature.
TimedTable full_table_quadrature(TableKind kind, int n, const ProblemSpec& spec,
                                 int order = kDefaultQuadratureOrder);

}  // namespace hjbrec
