#include "hjbrec/integral_table.hpp"

#include <algorithm>
#include <cmath>

#include "hjbrec/errors.hpp"

namespace hjbrec {

int rank_of(TableKind kind) {
  switch (kind) {
    case TableKind::A: return 3;
    case TableKind::B: return 2;
    case TableKind::C: return 1;
  }
  return 0;
}

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::A: return "a";
    case TableKind::B: return "b";
    case TableKind::C: return "c";
  }
  return "?";
}

TableKind table_kind_from_string(std::string_view s) {
  if (s == "a") return TableKind::A;
  if (s == "b") return TableKind::B;
  if (s == "c") return TableKind::C;
  throw UsageError("unknown table kind '" + std::string(s) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Unset: return "unset";
    case Provenance::Seed: return "seed";
    case Provenance::Derived: return "derived";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::Fallback: return "fallback";
  }
  return "?";
}

namespace {

Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::Unset, Provenance::Seed, Provenance::Derived, Provenance::Quadrature,
                 Provenance::Fallback}) {
    if (to_string(p) == s) return p;
  }
  throw ParseError("unknown provenance '" + std::string(s) + "'", 0);
}

}  // namespace

IntegralTable::IntegralTable(TableKind kind, int n) : kind_(kind), n_(n) {
  if (n < 1) throw UsageError("table bound N must be at least 1");
  std::size_t size = 1;
  for (int d = 0; d < rank(); ++d) size *= static_cast<std::size_t>(n);
  values_.assign(size, 0.0);
  origins_.assign(size, EntryOrigin{});
}

bool IntegralTable::contains(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) return false;
  return std::all_of(idx.begin(), idx.end(), [&](int v) { return v >= 1 && v <= n_; });
}

std::size_t IntegralTable::offset(std::span<const int> idx) const {
  if (!contains(idx)) throw RangeError("index " + label(idx) + " outside 1.." + std::to_string(n_));
  std::size_t off = 0;
  for (int v : idx) off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v - 1);
  return off;
}

Index IntegralTable::index_at(std::size_t off) const {
  Index idx(static_cast<std::size_t>(rank()));
  for (int d = rank() - 1; d >= 0; --d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(off % static_cast<std::size_t>(n_)) + 1;
    off /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t IntegralTable::stride(int dim) const {
  std::size_t s = 1;
  for (int d = rank() - 1; d > dim; --d) s *= static_cast<std::size_t>(n_);
  return s;
}

bool IntegralTable::is_set(std::span<const int> idx) const {
  return contains(idx) && origins_[offset(idx)].tag != Provenance::Unset;
}

double IntegralTable::at(std::span<const int> idx) const {
  const std::size_t off = offset(idx);
  if (origins_[off].tag == Provenance::Unset) throw RangeError("entry " + label(idx) + " is unset");
  return values_[off];
}

const EntryOrigin& IntegralTable::origin(std::span<const int> idx) const {
  return origins_[offset(idx)];
}

void IntegralTable::set(std::span<const int> idx, double value, EntryOrigin origin) {
  const std::size_t off = offset(idx);
  values_[off] = value;
  origins_[off] = origin;
}

double IntegralTable::max_abs() const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (origins_[k].tag != Provenance::Unset) m = std::max(m, std::abs(values_[k]));
  }
  return m;
}

ProvenanceCounts IntegralTable::counts() const {
  ProvenanceCounts c;
  for (const auto& o : origins_) {
    switch (o.tag) {
      case Provenance::Unset: ++c.unset; break;
      case Provenance::Seed: ++c.seed; break;
      case Provenance::Derived: ++c.derived; break;
      case Provenance::Quadrature: ++c.quadrature; break;
      case Provenance::Fallback: ++c.fallback; break;
    }
  }
  return c;
}

IntegralTable IntegralTable::truncated(int n) const {
  if (n > n_) throw UsageError("cannot truncate a table of size " + std::to_string(n_) + " to " +
                               std::to_string(n));
  IntegralTable t(kind_, n);
  t.operator_ids_ = operator_ids_;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Index idx = t.index_at(k);
    const std::size_t src = offset(idx);
    t.values_[k] = values_[src];
    t.origins_[k] = origins_[src];
  }
  return t;
}

std::string IntegralTable::label(std::span<const int> idx) const {
  std::string s(to_string(kind_));
  s += "(";
  for (std::size_t d = 0; d < idx.size(); ++d) {
    if (d != 0) s += ",";
    s += std::to_string(idx[d]);
  }
  return s + ")";
}

nlohmann::json IntegralTable::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind_));
  j["N"] = n_;
  auto entries = nlohmann::json::array();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const auto& o = origins_[k];
    nlohmann::json e{{"idx", index_at(k)}, {"value", values_[k]},
                     {"provenance", std::string(to_string(o.tag))}};
    if (o.tag == Provenance::Derived && o.op >= 0 &&
        static_cast<std::size_t>(o.op) < operator_ids_.size()) {
      e["operator"] = operator_ids_[static_cast<std::size_t>(o.op)];
      e["pivot"] = o.pivot;
    }
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  if (!operator_ids_.empty()) j["operators"] = operator_ids_;
  return j;
}

IntegralTable IntegralTable::from_json(const nlohmann::json& j) {
  try {
    IntegralTable t(table_kind_from_string(j.at("kind").get<std::string>()), j.at("N").get<int>());
    if (j.contains("operators")) t.operator_ids_ = j.at("operators").get<std::vector<std::string>>();
    for (const auto& e : j.at("entries")) {
      const Index idx = e.at("idx").get<Index>();
      EntryOrigin o;
      o.tag = provenance_from_string(e.at("provenance").get<std::string>());
      if (e.contains("operator")) {
        const auto id = e.at("operator").get<std::string>();
        auto it = std::find(t.operator_ids_.begin(), t.operator_ids_.end(), id);
        if (it != t.operator_ids_.end()) o.op = static_cast<int>(it - t.operator_ids_.begin());
        o.pivot = e.value("pivot", -1);
      }
      t.set(idx, e.at("value").get<double>(), o);
    }
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("integral table JSON: ") + ex.what(), 0);
  }
}

}  // namespace hjbrec
