#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjbrec/integral_table.hpp"
#include "hjbrec/operators.hpp"

namespace hjbrec {

struct RecurrenceOperator {
  std::string id;
  ShiftOp op;
  /// Disabled operators are still verified but never used to fill tables.
  bool enabled = true;
  std::string note;
};

/// Annihilating difference operators for one table. Operator index names are
/// bound positionally to the table dimensions.
struct RecurrenceSystem {
  TableKind kind = TableKind::C;
  std::vector<std::string> indices;
  std::vector<RecurrenceOperator> operators;

  /// Copy holding only the enabled operators.
  RecurrenceSystem enabled_only() const;
};

struct OperatorFile {
  std::string problem;
  std::string description;
  std::vector<RecurrenceSystem> families;

  const RecurrenceSystem* family(TableKind kind) const;
};

/// Reads the operator file format:
///   {"problem": ..., "families": [{"kind": "a", "indices": [...],
///     "operators": [{"id": ..., "enabled": true, "expr": "...", "operator": {...}}]}]}
/// Each operator needs "operator" (exact JSON terms) or "expr"; when both are
/// present they must agree. Syntax errors report line and column.
OperatorFile load_operator_file(const std::filesystem::path& path);
OperatorFile parse_operator_file(const nlohmann::json& j);
nlohmann::json to_json(const OperatorFile& file);

/// Sum over terms of coeff(base) * t[base + shift]. Coefficients are evaluated
/// at the unshifted base index. Terms whose coefficient vanishes at `base` are
/// skipped; any other term must land on a populated entry (RangeError otherwise).
double apply_shift_to_table(const ShiftOp& e, const IntegralTable& t, std::span<const int> base);

struct PivotSolution {
  double value = 0.0;
  int term = -1;  // position of the pivot term in the operator's canonical order
  Index base;
};

/// Solves the relation e . t = 0 at some base for the unset entry `target`.
/// Candidate pivots are tried in term order; a candidate is rejected when its
/// coefficient is exactly zero at the base or when another contributing entry
/// is unset or out of range. Returns nullopt when no candidate works.
std::optional<PivotSolution> pivot_solve(const ShiftOp& op, const IntegralTable& table,
                                         std::span<const int> target);

struct Seed {
  Index idx;
  double value = 0.0;
};

using FallbackFn = std::function<double(std::span<const int>)>;

struct FillResult {
  IntegralTable table;
  ProvenanceCounts counts;
  std::vector<Index> fallback_entries;
  double seconds_total = 0.0;
  double seconds_fallback = 0.0;

  /// Time spent in the recurrence itself.
  double seconds_recurrence() const { return seconds_total - seconds_fallback; }
};

/// Populates the table from seeds using the enabled operators. Entries are
/// swept in ascending index sum, ties lexicographic, repeating until no entry
/// can be derived; then the first unset entry goes to `fallback` and the sweep
/// resumes. Output is deterministic and invariant under rescaling an operator.
FillResult fill_table(const RecurrenceSystem& sys, std::span<const Seed> seeds, int n,
                      const FallbackFn& fallback);

struct OperatorReport {
  std::string id;
  bool enabled = true;
  std::size_t bases_checked = 0;
  double max_residual = 0.0;  // normalized by the table max
  Index worst_base;
  std::vector<Index> violations;
  bool passed = true;
};

struct VerificationReport {
  TableKind kind = TableKind::C;
  double table_max = 0.0;
  double tolerance = 0.0;
  std::vector<OperatorReport> operators;

  bool all_passed() const;
};

/// Residual of every operator (enabled or not) at every base where the
/// contributing entries are in range, divided by max |t|.
VerificationReport verify_annihilation(const RecurrenceSystem& sys, const IntegralTable& t,
                                       double tol);

/// Entries a seedless fill would hand to the fallback, in the order it would.
std::vector<Index> minimal_seed_report(const RecurrenceSystem& sys, int n);

}  // namespace hjbrec
