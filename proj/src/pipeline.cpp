#include "hjbrec/pipeline.hpp"

#include <chrono>
#include <cstdlib>

#include "hjbrec/quadrature.hpp"

#ifndef HJBREC_DATA_DIR
#define HJBREC_DATA_DIR "data"
#endif

namespace hjbrec {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("HJBREC_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return HJBREC_DATA_DIR;
}

std::optional<std::filesystem::path> default_operator_file(std::string_view problem) {
  const auto p = data_dir() / (std::string(problem) + "-operators.json");
  if (std::filesystem::exists(p)) return p;
  return std::nullopt;
}

std::vector<Seed> auto_seeds(const RecurrenceSystem& sys, int n, const ProblemSpec& spec) {
  std::vector<Seed> seeds;
  for (const Index& idx : minimal_seed_report(sys, n)) {
    seeds.push_back({idx, seed_integral(sys.kind, idx, spec)});
  }
  return seeds;
}

TableBuild build_table(TableKind kind, int n, const ProblemSpec& spec, const RecurrenceSystem* sys,
                       const std::vector<Seed>* seeds) {
  if (sys == nullptr) {
    auto q = full_table_quadrature(kind, n, spec);
    TableBuild out{std::move(q.table)};
    out.seconds_quadrature = q.seconds;
    return out;
  }
  std::vector<Seed> own;
  double seed_time = 0.0;
  if (seeds == nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    own = auto_seeds(*sys, n, spec);
    seed_time = seconds_since(t0);
    seeds = &own;
  }
  FillResult r = fill_table(*sys, *seeds, n, [&](std::span<const int> idx) {
    return seed_integral(kind, idx, spec);
  });
  TableBuild out{std::move(r.table)};
  out.seed_count = seeds->size();
  out.seconds_seeds = seed_time;
  out.seconds_recurrence = r.seconds_recurrence();
  out.seconds_fallback = r.seconds_fallback;
  out.used_recurrence = true;
  return out;
}

const TableBuild& TableSet::get(TableKind kind) const {
  switch (kind) {
    case TableKind::A: return a;
    case TableKind::B: return b;
    case TableKind::C: return c;
  }
  return c;
}

TableSet build_tables(int n, const ProblemSpec& spec, const OperatorFile* ops) {
  auto one = [&](TableKind kind) {
    const RecurrenceSystem* sys = ops != nullptr ? ops->family(kind) : nullptr;
    return build_table(kind, n, spec, sys);
  };
  return TableSet{one(TableKind::A), one(TableKind::B), one(TableKind::C)};
}

}  // namespace hjbrec
