#include "hjbrec/recurrence.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hjbrec/errors.hpp"
#include "hjbrec/op_json.hpp"

namespace hjbrec {

namespace {

using Clock = std::chrono::steady_clock;
using IntIndex = std::array<int, 3>;

struct IntMonomial {
  __int128 coef = 0;
  IntIndex exps{};
};

struct CompiledTerm {
  IntIndex shift{};
  std::vector<IntMonomial> coef;
};

constexpr int kMaxFastDegree = 8;

// Integer form of a shift operator: every coefficient polynomial is multiplied
// by the common denominator. With `normalize` the integer content is divided
// out and the sign fixed by the first term, so rational multiples of one
// operator compile identically.
struct CompiledOperator {
  int rank = 0;
  std::vector<CompiledTerm> terms;
  double scale = 1.0;  // multiply integer evaluations by this to get true values
  int max_degree = 0;
  double abs_coef_sum = 0.0;
  int fast_limit = 0;  // indices up to this bound evaluate without overflow in 64 bits
};

CompiledOperator compile(const ShiftOp& op, int rank, bool normalize) {
  if (static_cast<int>(op.vars().size()) != rank) {
    throw UsageError("operator has " + std::to_string(op.vars().size()) +
                     " indices but the table has rank " + std::to_string(rank));
  }
  if (!op.params().empty()) {
    throw UsageError("operator with free parameters cannot act on a numeric table");
  }
  mpz_class lcm = 1;
  for (const auto& [shift, coeff] : op.terms()) {
    for (const auto& [e, c] : coeff.terms()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.denominator().get_mpz_t());
  }
  mpz_class content = 0;
  bool first = true;
  int sign = 1;
  for (const auto& [shift, coeff] : op.terms()) {
    for (const auto& [e, c] : coeff.terms()) {
      const mpz_class v = c.numerator() * (lcm / c.denominator());
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
      if (first) sign = sgn(v) < 0 ? -1 : 1;
      first = false;
    }
  }
  if (content == 0) content = 1;
  CompiledOperator out;
  out.rank = rank;
  out.scale = normalize ? 1.0 : mpq_class(mpq_class(content, lcm) * sign).get_d();
  for (const auto& [shift, coeff] : op.terms()) {
    CompiledTerm term;
    for (int d = 0; d < rank; ++d) term.shift[static_cast<std::size_t>(d)] = shift[static_cast<std::size_t>(d)];
    for (const auto& [e, c] : coeff.terms()) {
      const mpz_class v = c.numerator() * (lcm / c.denominator()) / content * sign;
      if (!v.fits_slong_p()) throw RangeError("operator coefficient too large: " + v.get_str());
      IntMonomial m;
      m.coef = v.get_si();
      int degree = 0;
      for (int d = 0; d < rank; ++d) {
        m.exps[static_cast<std::size_t>(d)] = e[static_cast<std::size_t>(d)];
        degree += e[static_cast<std::size_t>(d)];
      }
      out.max_degree = std::max(out.max_degree, degree);
      out.abs_coef_sum += std::abs(v.get_d());
      term.coef.push_back(m);
    }
    out.terms.push_back(std::move(term));
  }
  if (out.max_degree < kMaxFastDegree) {
    const double lim = std::pow(0x1p60 / std::max(1.0, out.abs_coef_sum), 1.0 / std::max(1, out.max_degree));
    out.fast_limit = static_cast<int>(std::min(lim, 1e9));
  }
  return out;
}

__int128 evaluate_checked(const std::vector<IntMonomial>& poly, const IntIndex& at, int rank) {
  __int128 sum = 0;
  for (const auto& m : poly) {
    __int128 t = m.coef;
    for (int d = 0; d < rank; ++d) {
      for (int p = 0; p < m.exps[static_cast<std::size_t>(d)]; ++p) {
        if (__builtin_mul_overflow(t, static_cast<__int128>(at[static_cast<std::size_t>(d)]), &t)) {
          throw RangeError("overflow evaluating an operator coefficient");
        }
      }
    }
    if (__builtin_add_overflow(sum, t, &sum)) throw RangeError("overflow evaluating an operator coefficient");
  }
  return sum;
}

// Powers 0..kMaxFastDegree-1 of each index of one base point.
struct Powers {
  bool fast = false;
  std::int64_t p[3][kMaxFastDegree];
};

Powers powers_at(const CompiledOperator& op, const IntIndex& at) {
  Powers pw;
  pw.fast = op.fast_limit > 0;
  for (int d = 0; d < op.rank && pw.fast; ++d) {
    const int x = at[static_cast<std::size_t>(d)];
    if (std::abs(x) > op.fast_limit) pw.fast = false;
    pw.p[d][0] = 1;
    for (int e = 1; e <= op.max_degree; ++e) pw.p[d][e] = pw.p[d][e - 1] * x;
  }
  return pw;
}

// Exact value of a coefficient polynomial at an index; 64-bit arithmetic when
// the operator's magnitude bound rules out overflow.
__int128 evaluate(const CompiledOperator& op, const std::vector<IntMonomial>& poly,
                  const IntIndex& at, const Powers& pw) {
  if (!pw.fast) return evaluate_checked(poly, at, op.rank);
  std::int64_t sum = 0;
  for (const auto& m : poly) {
    auto t = static_cast<std::int64_t>(m.coef);
    for (int d = 0; d < op.rank; ++d) t *= pw.p[d][m.exps[static_cast<std::size_t>(d)]];
    sum += t;
  }
  return sum;
}

__int128 evaluate(const CompiledOperator& op, const std::vector<IntMonomial>& poly,
                  const IntIndex& at) {
  return evaluate(op, poly, at, powers_at(op, at));
}

IntIndex to_int_index(std::span<const int> idx) {
  IntIndex r{1, 1, 1};
  std::copy(idx.begin(), idx.end(), r.begin());
  return r;
}

// Offset of base + shift, or -1 when outside 1..N.
long long shifted_offset(const IntegralTable& t, const IntIndex& base, const IntIndex& shift) {
  const int n = t.n();
  long long off = 0;
  for (int d = 0; d < t.rank(); ++d) {
    const int v = base[static_cast<std::size_t>(d)] + shift[static_cast<std::size_t>(d)];
    if (v < 1 || v > n) return -1;
    off = off * n + (v - 1);
  }
  return off;
}

struct Solution {
  double value;
  int term;
  IntIndex base;
};

template <bool kComputeValues>
std::optional<Solution> try_pivot(const CompiledOperator& op, const IntegralTable& t,
                                  const IntIndex& target) {
  const int rank = op.rank;
  const auto origins = t.origins();
  const auto values = t.values();
  for (std::size_t p = 0; p < op.terms.size(); ++p) {
    IntIndex base{1, 1, 1};
    bool valid = true;
    for (int d = 0; d < rank; ++d) {
      const auto k = static_cast<std::size_t>(d);
      base[k] = target[k] - op.terms[p].shift[k];
      if (base[k] < 1) valid = false;
    }
    if (!valid) continue;
    const Powers pw = powers_at(op, base);
    const __int128 pivot = evaluate(op, op.terms[p].coef, base, pw);
    if (pivot == 0) continue;
    double sum = 0.0;
    for (std::size_t u = 0; u < op.terms.size() && valid; ++u) {
      if (u == p) continue;
      const __int128 c = evaluate(op, op.terms[u].coef, base, pw);
      if (c == 0) continue;
      const long long off = shifted_offset(t, base, op.terms[u].shift);
      if (off < 0 || origins[static_cast<std::size_t>(off)].tag == Provenance::Unset) {
        valid = false;
        break;
      }
      if constexpr (kComputeValues) sum += static_cast<double>(c) * values[static_cast<std::size_t>(off)];
    }
    if (!valid) continue;
    double v = kComputeValues ? -sum / static_cast<double>(pivot) : 0.0;
    if (v == 0.0) v = 0.0;
    return Solution{v, static_cast<int>(p), base};
  }
  return std::nullopt;
}

IntIndex decode(std::size_t off, int n, int rank) {
  IntIndex r{1, 1, 1};
  for (int d = rank - 1; d >= 0; --d) {
    r[static_cast<std::size_t>(d)] = static_cast<int>(off % static_cast<std::size_t>(n)) + 1;
    off /= static_cast<std::size_t>(n);
  }
  return r;
}

struct SweepEntry {
  std::size_t offset;
  IntIndex index;
};

// Ascending index sum; a counting sort keeps row-major (lexicographic) order
// among ties.
std::vector<SweepEntry> sweep_order(const IntegralTable& t) {
  const int rank = t.rank();
  std::vector<std::size_t> bucket(static_cast<std::size_t>(3 * t.n() + 2), 0);
  std::vector<SweepEntry> entries(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    entries[k] = {k, decode(k, t.n(), rank)};
    ++bucket[static_cast<std::size_t>(entries[k].index[0] + entries[k].index[1] + entries[k].index[2]) + 1];
  }
  for (std::size_t b = 1; b < bucket.size(); ++b) bucket[b] += bucket[b - 1];
  std::vector<SweepEntry> order(t.size());
  for (const SweepEntry& e : entries) {
    order[bucket[static_cast<std::size_t>(e.index[0] + e.index[1] + e.index[2])]++] = e;
  }
  return order;
}

struct CompiledSystem {
  std::vector<CompiledOperator> ops;
  std::vector<int> ids;  // position in sys.operators
};

CompiledSystem compile_enabled(const RecurrenceSystem& sys) {
  CompiledSystem cs;
  for (std::size_t k = 0; k < sys.operators.size(); ++k) {
    if (!sys.operators[k].enabled) continue;
    cs.ops.push_back(compile(sys.operators[k].op, rank_of(sys.kind), true));
    cs.ids.push_back(static_cast<int>(k));
  }
  return cs;
}

template <bool kComputeValues, typename OnFallback>
void run_sweep(const CompiledSystem& cs, IntegralTable& t, OnFallback&& on_fallback) {
  std::vector<SweepEntry> pending;
  for (const SweepEntry& e : sweep_order(t)) {
    if (t.origins()[e.offset].tag == Provenance::Unset) pending.push_back(e);
  }
  const auto values = t.values();
  const auto origins = t.origins();
  std::size_t head = 0;
  while (head < pending.size()) {
    bool progress = true;
    while (progress && head < pending.size()) {
      progress = false;
      std::size_t keep = head;
      for (std::size_t k = head; k < pending.size(); ++k) {
        const SweepEntry e = pending[k];
        bool solved = false;
        for (std::size_t o = 0; o < cs.ops.size() && !solved; ++o) {
          if (auto s = try_pivot<kComputeValues>(cs.ops[o], t, e.index)) {
            values[e.offset] = s->value;
            origins[e.offset] = {Provenance::Derived, cs.ids[o], s->term};
            solved = true;
          }
        }
        if (solved) {
          progress = true;
        } else {
          pending[keep++] = e;
        }
      }
      pending.resize(keep);
    }
    if (head == pending.size()) break;
    const std::size_t off = pending[head++].offset;
    values[off] = on_fallback(t.index_at(off));
    origins[off] = {Provenance::Fallback};
  }
}

std::vector<std::string> operator_ids(const RecurrenceSystem& sys) {
  std::vector<std::string> ids;
  for (const auto& op : sys.operators) ids.push_back(op.id);
  return ids;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RecurrenceSystem RecurrenceSystem::enabled_only() const {
  RecurrenceSystem r{kind, indices, {}};
  for (const auto& op : operators) {
    if (op.enabled) r.operators.push_back(op);
  }
  return r;
}

const RecurrenceSystem* OperatorFile::family(TableKind kind) const {
  for (const auto& f : families) {
    if (f.kind == kind) return &f;
  }
  return nullptr;
}

OperatorFile parse_operator_file(const nlohmann::json& j) {
  OperatorFile file;
  try {
    file.problem = j.value("problem", "");
    file.description = j.value("description", "");
    for (const auto& fam : j.at("families")) {
      RecurrenceSystem sys;
      sys.kind = table_kind_from_string(fam.at("kind").get<std::string>());
      sys.indices = fam.at("indices").get<std::vector<std::string>>();
      if (static_cast<int>(sys.indices.size()) != rank_of(sys.kind)) {
        throw ParseError("family '" + std::string(to_string(sys.kind)) + "' needs " +
                             std::to_string(rank_of(sys.kind)) + " indices",
                         0);
      }
      for (const auto& entry : fam.at("operators")) {
        RecurrenceOperator rop;
        rop.id = entry.at("id").get<std::string>();
        rop.enabled = entry.value("enabled", true);
        rop.note = entry.value("note", "");
        const bool has_terms = entry.contains("operator");
        const bool has_expr = entry.contains("expr");
        if (!has_terms && !has_expr) {
          throw ParseError("operator " + rop.id + " has neither 'operator' nor 'expr'", 0);
        }
        if (has_terms) {
          rop.op = shift_op_from_json(entry.at("operator"));
          if (rop.op.vars() != sys.indices || !rop.op.params().empty()) {
            throw ParseError("operator " + rop.id + " is not over the family indices", 0);
          }
        }
        if (has_expr) {
          const ShiftOp parsed = ShiftOp::parse(entry.at("expr").get<std::string>(), sys.indices);
          if (has_terms && !(parsed == rop.op)) {
            throw ParseError("operator " + rop.id + ": 'expr' and 'operator' disagree", 0);
          }
          rop.op = parsed;
        }
        sys.operators.push_back(std::move(rop));
      }
      file.families.push_back(std::move(sys));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("operator file: ") + ex.what(), 0);
  }
  return file;
}

OperatorFile load_operator_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open operator file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + line_col(text, ex.byte > 0 ? ex.byte - 1 : 0) + ": " +
                         ex.what(),
                     ex.byte);
  }
  return parse_operator_file(j);
}

nlohmann::json to_json(const OperatorFile& file) {
  nlohmann::json j;
  j["problem"] = file.problem;
  if (!file.description.empty()) j["description"] = file.description;
  auto fams = nlohmann::json::array();
  for (const auto& sys : file.families) {
    nlohmann::json f;
    f["kind"] = std::string(to_string(sys.kind));
    f["indices"] = sys.indices;
    auto ops = nlohmann::json::array();
    for (const auto& rop : sys.operators) {
      nlohmann::json o{{"id", rop.id}, {"enabled", rop.enabled}, {"expr", rop.op.str()},
                       {"operator", to_json(rop.op)}};
      if (!rop.note.empty()) o["note"] = rop.note;
      ops.push_back(std::move(o));
    }
    f["operators"] = std::move(ops);
    fams.push_back(std::move(f));
  }
  j["families"] = std::move(fams);
  return j;
}

double apply_shift_to_table(const ShiftOp& e, const IntegralTable& t, std::span<const int> base) {
  if (static_cast<int>(base.size()) != t.rank()) throw UsageError("base index has wrong rank");
  const CompiledOperator op = compile(e, t.rank(), false);
  const IntIndex b = to_int_index(base);
  double sum = 0.0;
  for (const auto& term : op.terms) {
    const __int128 c = evaluate(op, term.coef, b);
    if (c == 0) continue;
    Index at(base.begin(), base.end());
    for (std::size_t d = 0; d < at.size(); ++d) at[d] += term.shift[d];
    if (!t.is_set(at)) {
      throw RangeError("operator needs " + t.label(at) + ", which is " +
                       (t.contains(at) ? "unset" : "outside 1.." + std::to_string(t.n())));
    }
    sum += static_cast<double>(c) * t.at(at);
  }
  return sum * op.scale;
}

std::optional<PivotSolution> pivot_solve(const ShiftOp& op, const IntegralTable& table,
                                         std::span<const int> target) {
  if (!table.contains(target)) throw RangeError("target " + table.label(target) + " out of range");
  const CompiledOperator c = compile(op, table.rank(), true);
  auto s = try_pivot<true>(c, table, to_int_index(target));
  if (!s) return std::nullopt;
  return PivotSolution{s->value, s->term,
                       Index(s->base.begin(), s->base.begin() + table.rank())};
}

FillResult fill_table(const RecurrenceSystem& sys, std::span<const Seed> seeds, int n,
                      const FallbackFn& fallback) {
  const auto start = Clock::now();
  const CompiledSystem cs = compile_enabled(sys);
  FillResult out{IntegralTable(sys.kind, n), {}, {}, 0.0, 0.0};
  out.table.set_operator_ids(operator_ids(sys));
  for (const auto& s : seeds) {
    if (!out.table.contains(s.idx)) {
      throw UsageError("seed " + out.table.label(s.idx) + " outside the table");
    }
    out.table.set(s.idx, s.value, {Provenance::Seed});
  }
  Clock::duration in_fallback{};
  run_sweep<true>(cs, out.table, [&](const Index& idx) {
    if (!fallback) {
      throw UsageError("entry " + out.table.label(idx) + " is not derivable and no fallback was given");
    }
    const auto t0 = Clock::now();
    const double v = fallback(idx);
    in_fallback += Clock::now() - t0;
    out.fallback_entries.push_back(idx);
    return v;
  });
  out.counts = out.table.counts();
  out.seconds_total = std::chrono::duration<double>(Clock::now() - start).count();
  out.seconds_fallback = std::chrono::duration<double>(in_fallback).count();
  return out;
}

std::vector<Index> minimal_seed_report(const RecurrenceSystem& sys, int n) {
  const CompiledSystem cs = compile_enabled(sys);
  IntegralTable t(sys.kind, n);
  std::vector<Index> needed;
  run_sweep<false>(cs, t, [&](const Index& idx) {
    needed.push_back(idx);
    return 0.0;
  });
  return needed;
}

bool VerificationReport::all_passed() const {
  return std::all_of(operators.begin(), operators.end(),
                     [](const OperatorReport& r) { return r.passed; });
}

VerificationReport verify_annihilation(const RecurrenceSystem& sys, const IntegralTable& t,
                                       double tol) {
  if (sys.kind != t.kind()) throw UsageError("operator family and table kind differ");
  VerificationReport report;
  report.kind = t.kind();
  report.tolerance = tol;
  report.table_max = t.max_abs();
  const double norm = report.table_max > 0.0 ? report.table_max : 1.0;
  const auto values = t.values();
  const auto origins = t.origins();
  for (const auto& rop : sys.operators) {
    const CompiledOperator op = compile(rop.op, t.rank(), false);
    OperatorReport r;
    r.id = rop.id;
    r.enabled = rop.enabled;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Index idx = t.index_at(k);
      const IntIndex base = to_int_index(idx);
      double sum = 0.0;
      bool in_range = true;
      bool any = false;
      for (const auto& term : op.terms) {
        const __int128 c = evaluate(op, term.coef, base);
        if (c == 0) continue;
        const long long off = shifted_offset(t, base, term.shift);
        if (off < 0 || origins[static_cast<std::size_t>(off)].tag == Provenance::Unset) {
          in_range = false;
          break;
        }
        any = true;
        sum += static_cast<double>(c) * values[static_cast<std::size_t>(off)];
      }
      if (!in_range || !any) continue;
      ++r.bases_checked;
      const double res = std::abs(sum * op.scale) / norm;
      if (r.worst_base.empty() || res > r.max_residual) {
        r.max_residual = res;
        r.worst_base = idx;
      }
      if (!(res <= tol)) r.violations.push_back(idx);
    }
    r.passed = r.violations.empty();
    report.operators.push_back(std::move(r));
  }
  return report;
}

}  // namespace hjbrec
