#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hjbrec {

/// a(i,j,k) = <dH_i (g R^-1 g) dH_j, H_k>, b(i,k) = <dH_i f, H_k>, c(k) = <q, H_k>.
enum class TableKind { A, B, C };

int rank_of(TableKind kind);
std::string_view to_string(TableKind kind);
TableKind table_kind_from_string(std::string_view s);

enum class Provenance : std::uint8_t { Unset, Seed, Derived, Quadrature, Fallback };

std::string_view to_string(Provenance p);

/// Where an entry came from. For derived entries `op` indexes the table's
/// operator id list and `pivot` is the position of the pivot term in that
/// operator's canonical term order.
struct EntryOrigin {
  Provenance tag = Provenance::Unset;
  int op = -1;
  int pivot = -1;
};

struct ProvenanceCounts {
  std::size_t unset = 0;
  std::size_t seed = 0;
  std::size_t derived = 0;
  std::size_t quadrature = 0;
  std::size_t fallback = 0;

  std::size_t total() const { return unset + seed + derived + quadrature + fallback; }
};

using Index = std::vector<int>;

/// Dense table over 1..N in each of rank_of(kind) dimensions.
class IntegralTable {
 public:
  IntegralTable() = default;
  IntegralTable(TableKind kind, int n);

  TableKind kind() const { return kind_; }
  int n() const { return n_; }
  int rank() const { return rank_of(kind_); }
  std::size_t size() const { return values_.size(); }

  bool contains(std::span<const int> idx) const;
  /// Row-major offset of a 1-based index; throws RangeError when outside 1..N.
  std::size_t offset(std::span<const int> idx) const;
  Index index_at(std::size_t offset) const;
  /// Offset step for +1 in dimension `dim`.
  std::size_t stride(int dim) const;

  bool is_set(std::span<const int> idx) const;
  /// Value of a populated entry; throws RangeError for unset or out-of-range.
  double at(std::span<const int> idx) const;
  const EntryOrigin& origin(std::span<const int> idx) const;
  void set(std::span<const int> idx, double value, EntryOrigin origin);

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const EntryOrigin> origins() const { return origins_; }
  std::span<EntryOrigin> origins() { return origins_; }

  const std::vector<std::string>& operator_ids() const { return operator_ids_; }
  void set_operator_ids(std::vector<std::string> ids) { operator_ids_ = std::move(ids); }

  double max_abs() const;
  ProvenanceCounts counts() const;

  /// Leading n x ... x n block.
  IntegralTable truncated(int n) const;

  /// Formats an index as e.g. "a(1,2,1)".
  std::string label(std::span<const int> idx) const;

  nlohmann::json to_json() const;
  static IntegralTable from_json(const nlohmann::json& j);

 private:
  TableKind kind_ = TableKind::C;
  int n_ = 0;
  std::vector<double> values_;
  std::vector<EntryOrigin> origins_;
  std::vector<std::string> operator_ids_;
};

}  // namespace hjbrec
