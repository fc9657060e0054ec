#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "hjbrec/galerkin.hpp"
#include "hjbrec/integral_table.hpp"
#include "hjbrec/problem.hpp"
#include "hjbrec/recurrence.hpp"

namespace hjbrec {

/// Directory holding the shipped operator files. HJBREC_DATA_DIR in the
/// environment overrides the build-time location.
std::filesystem::path data_dir();

/// Default operator file for a problem label, if one ships.
std::optional<std::filesystem::path> default_operator_file(std::string_view problem);

/// Seeds for a seedless fill: the entries minimal_seed_report names, each by
/// quadrature.
std::vector<Seed> auto_seeds(const RecurrenceSystem& sys, int n, const ProblemSpec& spec);

struct TableBuild {
  IntegralTable table;
  std::size_t seed_count = 0;
  double seconds_seeds = 0.0;       // quadrature for the seeds
  double seconds_recurrence = 0.0;  // fill excluding fallback quadrature
  double seconds_fallback = 0.0;
  double seconds_quadrature = 0.0;  // full-quadrature path only
  bool used_recurrence = false;
};

/// Recurrence fill when `sys` is given (seeds automatic unless supplied),
/// full quadrature otherwise.
TableBuild build_table(TableKind kind, int n, const ProblemSpec& spec,
                       const RecurrenceSystem* sys,
                       const std::vector<Seed>* seeds = nullptr);

struct TableSet {
  TableBuild a, b, c;
  const TableBuild& get(TableKind kind) const;
};

/// All three tables; families missing from `ops` (or a null `ops`) fall back
/// to full quadrature.
TableSet build_tables(int n, const ProblemSpec& spec, const OperatorFile* ops);

}  // namespace hjbrec
