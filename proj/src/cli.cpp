#include "hjbrec/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hjbrec/control.hpp"
#include "hjbrec/errors.hpp"
#include "hjbrec/galerkin.hpp"
#include "hjbrec/pipeline.hpp"
#include "hjbrec/quadrature.hpp"

namespace hjbrec::cli {

namespace {

namespace fs = std::filesystem;
constexpr TableKind kKinds[] = {TableKind::A, TableKind::B, TableKind::C};

struct RunConfig {
  std::string problem = "sin-system";
  std::vector<int> n;
  double eps = 1e-9;
  int l_max = 50;
  double dt = 1e-3;
  double t_end = 10.0;
  double x0 = 4.0;
  std::string ops;
  std::string out = ".";
  bool oracle = false;
  std::string seeds = "auto";
  std::string result;
  std::string tables;
  double tol = 1e-6;
};

int single_n(const RunConfig& cfg, int fallback) {
  if (cfg.n.empty()) return fallback;
  if (cfg.n.size() != 1) throw UsageError("this command takes a single --n");
  return cfg.n.front();
}

void check_n(int n) {
  if (n < 1) throw UsageError("--n must be at least 1");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what(), ex.byte);
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path.string());
  os << j.dump(1) << '\n';
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path out(cfg.out);
  fs::create_directories(out);
  return out;
}

std::string table_file(TableKind kind, int n) {
  return "table-" + std::string(to_string(kind)) + "-N" + std::to_string(n) + ".json";
}

// Operator file for the run: --ops, else the shipped default for the
// problem. Empty when neither exists.
std::optional<OperatorFile> resolve_ops(const RunConfig& cfg, std::ostream& err) {
  if (!cfg.ops.empty()) return load_operator_file(cfg.ops);
  if (auto p = default_operator_file(cfg.problem)) return load_operator_file(*p);
  err << "note: no operator file for '" << cfg.problem << "'; using full quadrature\n";
  return std::nullopt;
}

std::map<TableKind, std::vector<Seed>> load_seeds(const std::string& path) {
  const auto j = read_json(path);
  std::map<TableKind, std::vector<Seed>> seeds;
  try {
    for (const auto& [key, list] : j.items()) {
      auto& dst = seeds[table_kind_from_string(key)];
      for (const auto& e : list) dst.push_back({e.at("idx").get<Index>(), e.at("value").get<double>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(path + ": " + ex.what(), 0);
  }
  return seeds;
}

std::string counts_line(const IntegralTable& t) {
  const auto c = t.counts();
  std::ostringstream os;
  os << to_string(t.kind()) << ": N=" << t.n() << " entries=" << c.total() << " seed=" << c.seed
     << " derived=" << c.derived << " fallback=" << c.fallback << " quadrature=" << c.quadrature;
  return os.str();
}

nlohmann::json counts_json(const ProvenanceCounts& c) {
  return {{"seed", c.seed},         {"derived", c.derived}, {"fallback", c.fallback},
          {"quadrature", c.quadrature}, {"unset", c.unset}, {"total", c.total()}};
}

TableSet make_tables(const RunConfig& cfg, int n, const ProblemSpec& spec, std::ostream& err) {
  if (cfg.oracle) return build_tables(n, spec, nullptr);
  const auto ops = resolve_ops(cfg, err);
  if (!ops) return build_tables(n, spec, nullptr);
  if (cfg.seeds == "auto") return build_tables(n, spec, &*ops);
  const auto seeds = load_seeds(cfg.seeds);
  auto one = [&](TableKind kind) {
    const RecurrenceSystem* sys = ops->family(kind);
    auto it = seeds.find(kind);
    return build_table(kind, n, spec, sys, it != seeds.end() && sys ? &it->second : nullptr);
  };
  return TableSet{one(TableKind::A), one(TableKind::B), one(TableKind::C)};
}

GalerkinSystem system_for(const RunConfig& cfg, int n, const ProblemSpec& spec,
                          nlohmann::json& provenance, std::ostream& err) {
  if (!cfg.tables.empty()) {
    const fs::path dir(cfg.tables);
    std::vector<IntegralTable> t;
    for (TableKind kind : kKinds) {
      t.push_back(IntegralTable::from_json(read_json(dir / table_file(kind, n))));
      provenance[std::string(to_string(kind))] = counts_json(t.back().counts());
    }
    return assemble(t[0], t[1], t[2]);
  }
  const TableSet ts = make_tables(cfg, n, spec, err);
  for (TableKind kind : kKinds) {
    provenance[std::string(to_string(kind))] = counts_json(ts.get(kind).table.counts());
  }
  return assemble(ts.a.table, ts.b.table, ts.c.table);
}

SgaResult solve(const RunConfig& cfg, int n, const ProblemSpec& spec, nlohmann::json& provenance,
                std::ostream& err) {
  const GalerkinSystem sys = system_for(cfg, n, spec, provenance, err);
  return sga_run(sys, SgaConfig{default_initial_guess(n), cfg.eps, cfg.l_max});
}

int cmd_fill(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const int n = single_n(cfg, 10);
  check_n(n);
  const ProblemSpec spec = problem_by_label(cfg.problem);
  const fs::path dir = prepare_out(cfg);
  const TableSet ts = make_tables(cfg, n, spec, err);
  for (TableKind kind : kKinds) {
    const auto& t = ts.get(kind).table;
    write_json(dir / table_file(kind, n), t.to_json());
    out << counts_line(t) << '\n';
    const auto c = t.counts();
    if (c.fallback * 5 > c.total()) {
      err << "warning: " << c.fallback << " of " << c.total() << " " << to_string(kind)
          << "-entries fell back to quadrature\n";
    }
  }
  return kOk;
}

int cmd_sga(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const int n = single_n(cfg, 14);
  check_n(n);
  const ProblemSpec spec = problem_by_label(cfg.problem);
  const fs::path dir = prepare_out(cfg);
  nlohmann::json provenance;
  const SgaResult r = solve(cfg, n, spec, provenance, err);
  nlohmann::json j = to_json(r);
  j["problem"] = cfg.problem;
  j["eps"] = cfg.eps;
  j["l_max"] = cfg.l_max;
  j["tables"] = provenance;
  const fs::path file = dir / ("sga-N" + std::to_string(n) + ".json");
  write_json(file, j);
  out << "N=" << n << " converged=" << (r.converged ? "true" : "false")
      << " iterations=" << r.iterations << " residual="
      << (r.residual_history.empty() ? r.initial_residual : r.residual_history.back()) << '\n';
  out << "wrote " << file.string() << '\n';
  if (!r.converged) err << "warning: no convergence within l_max=" << cfg.l_max << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const int n = single_n(cfg, 8);
  check_n(n);
  const ProblemSpec spec = problem_by_label(cfg.problem);
  const auto ops = resolve_ops(cfg, err);
  if (!ops) throw UsageError("verify needs an operator file (--ops)");
  bool all = true;
  for (const auto& fam : ops->families) {
    const auto oracle = full_table_quadrature(fam.kind, n, spec).table;
    const auto report = verify_annihilation(fam, oracle, cfg.tol);
    for (const auto& op : report.operators) {
      out << (op.passed ? "PASS " : "FAIL ") << op.id << (op.enabled ? "" : " (disabled)")
          << " bases=" << op.bases_checked << " max_residual=" << std::setprecision(3)
          << op.max_residual;
      if (!op.passed) {
        out << " violations=" << op.violations.size() << " first=" << oracle.label(op.violations.front())
            << " worst=" << oracle.label(op.worst_base);
      }
      out << '\n';
      all = all && op.passed;
    }
  }
  out << (all ? "all operators annihilate the oracle tables\n"
              : "some operators do not annihilate the oracle tables\n");
  return all ? kOk : kVerificationFailed;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = problem_by_label(cfg.problem);
  const fs::path dir = prepare_out(cfg);
  std::vector<std::pair<int, Eigen::VectorXd>> runs;
  if (!cfg.result.empty()) {
    const SgaResult r = sga_result_from_json(read_json(cfg.result));
    runs.emplace_back(static_cast<int>(r.v_star.size()), r.v_star);
  } else {
    const std::vector<int> ns = cfg.n.empty() ? std::vector<int>{14} : cfg.n;
    for (int n : ns) {
      check_n(n);
      nlohmann::json provenance;
      const SgaResult r = solve(cfg, n, spec, provenance, err);
      if (!r.converged) err << "warning: SGA for N=" << n << " did not converge\n";
      runs.emplace_back(n, r.v_star);
    }
  }
  int status = kOk;
  for (const auto& [n, v] : runs) {
    const ValueFunction vf(v);
    const std::string tag = "-N" + std::to_string(n) + ".csv";
    {
      std::ofstream os(dir / ("value-scan" + tag));
      write_scan_csv(os, "V", -3.0, 3.0, 601, [&](double x) { return vf.value(x); });
    }
    {
      std::ofstream os(dir / ("residual-scan" + tag));
      write_scan_csv(os, "hjb_residual", -3.0, 3.0, 601,
                     [&](double x) { return hjb_residual(vf, x, spec); });
    }
    std::ofstream os(dir / ("trajectory" + tag));
    out << "N=" << n << " |HJB(1.5)|=" << std::setprecision(4)
        << std::abs(hjb_residual(vf, 1.5, spec));
    try {
      const Trajectory tr = simulate(vf, spec, cfg.x0, cfg.t_end, cfg.dt);
      write_trajectory_csv(os, tr);
      out << " x(" << tr.times.back() << ")=" << tr.states.back() << '\n';
    } catch (const DivergenceError& ex) {
      write_trajectory_csv(os, ex.partial());
      out << " diverged\n";
      err << ex.what() << '\n';
      status = kDiverged;
    }
  }
  return status;
}

struct Deviation {
  double relative = 0.0;    // entries with |oracle| above 1e-8 and above 1e-9 of the table max
  double near_zero = 0.0;   // absolute, over the remaining (structurally zero) entries
  double normalized = 0.0;  // absolute over all entries, divided by the table max
};

Deviation deviation(const IntegralTable& t, const IntegralTable& oracle) {
  Deviation d;
  const auto a = t.values();
  const auto b = oracle.values();
  const double top = oracle.max_abs() > 0.0 ? oracle.max_abs() : 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = std::abs(a[k] - b[k]);
    d.normalized = std::max(d.normalized, diff / top);
    if (std::abs(b[k]) > std::max(1e-8, 1e-9 * top)) {
      d.relative = std::max(d.relative, diff / std::abs(b[k]));
    } else {
      d.near_zero = std::max(d.near_zero, diff);
    }
  }
  return d;
}

template <typename F>
auto median_of_three(F&& run, double (*seconds)(const decltype(run())&)) {
  auto r0 = run(), r1 = run(), r2 = run();
  const double t0 = seconds(r0), t1 = seconds(r1), t2 = seconds(r2);
  if ((t0 <= t1 && t1 <= t2) || (t2 <= t1 && t1 <= t0)) return r1;
  if ((t1 <= t0 && t0 <= t2) || (t2 <= t0 && t0 <= t1)) return r0;
  return r2;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<int> ns = cfg.n.empty() ? std::vector<int>{10, 15} : cfg.n;
  const ProblemSpec spec = problem_by_label(cfg.problem);
  const auto ops = resolve_ops(cfg, err);
  if (!ops) throw UsageError("bench needs an operator file (--ops)");
  const fs::path dir = prepare_out(cfg);
  out << std::setprecision(3);
  // Warm-up: builds quadrature rule caches and touches every code path once.
  for (TableKind kind : kKinds) {
    if (const auto* sys = ops->family(kind)) build_table(kind, 3, spec, sys);
    full_table_quadrature(kind, 3, spec);
  }
  nlohmann::json report = nlohmann::json::array();
  out << std::left << std::setw(4) << "N" << std::setw(6) << "kind" << std::setw(12) << "seeds[s]"
      << std::setw(14) << "recurrence[s]" << std::setw(13) << "fallback[s]" << std::setw(12)
      << "full[s]" << std::setw(10) << "ratio" << std::setw(12) << "rel dev" << std::setw(12) << "zero dev" << "norm dev\n";
  for (int n : ns) {
    check_n(n);
    double rec_total = 0.0, full_total = 0.0;
    nlohmann::json kinds;
    for (TableKind kind : kKinds) {
      const auto* sys = ops->family(kind);
      if (sys == nullptr) continue;
      const TableBuild rec = median_of_three(
          [&] { return build_table(kind, n, spec, sys); },
          +[](const TableBuild& b) { return b.seconds_recurrence; });
      const TimedTable full = median_of_three(
          [&] { return full_table_quadrature(kind, n, spec); },
          +[](const TimedTable& t) { return t.seconds; });
      const Deviation dev = deviation(rec.table, full.table);
      rec_total += rec.seconds_recurrence;
      full_total += full.seconds;
      const double ratio = full.seconds > 0.0 ? rec.seconds_recurrence / full.seconds : 0.0;
      out << std::setw(4) << n << std::setw(6) << to_string(kind) << std::setw(12)
          << rec.seconds_seeds << std::setw(14) << rec.seconds_recurrence << std::setw(13)
          << rec.seconds_fallback << std::setw(12) << full.seconds << std::setw(10) << ratio
          << std::setw(12) << dev.relative << std::setw(12) << dev.near_zero << dev.normalized << '\n';
      kinds[std::string(to_string(kind))] = {
          {"seconds_seed_quadrature", rec.seconds_seeds},
          {"seconds_recurrence_fill", rec.seconds_recurrence},
          {"seconds_fallback_quadrature", rec.seconds_fallback},
          {"seconds_full_quadrature", full.seconds},
          {"counts", counts_json(rec.table.counts())},
          {"max_relative_deviation", dev.relative},
          {"max_absolute_deviation_near_zero", dev.near_zero},
          {"max_normalized_deviation", dev.normalized}};
    }
    const double ratio = full_total > 0.0 ? rec_total / full_total : 0.0;
    out << "N=" << n << " recurrence/full = " << ratio << '\n';
    report.push_back({{"N", n},
                      {"kinds", kinds},
                      {"seconds_recurrence_fill", rec_total},
                      {"seconds_full_quadrature", full_total},
                      {"ratio", ratio}});
  }
  write_json(dir / "bench.json", {{"problem", cfg.problem}, {"runs", report}});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Galerkin HJB solver with recurrence-filled integral tables", "hjbrec"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", cfg.problem, "Problem label")
        ->check(CLI::IsMember(problem_labels()));
    sub->add_option("--ops", cfg.ops, "Operator file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "Output directory");
  };
  auto tables = [&](CLI::App* sub) {
    sub->add_flag("--oracle", cfg.oracle, "Build every table by full quadrature");
    sub->add_option("--seeds", cfg.seeds, "Seed file, or 'auto'");
  };
  auto sga_opts = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.eps, "Residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--lmax", cfg.l_max, "Maximum SGA iterations")->check(CLI::PositiveNumber);
    sub->add_option("--tables", cfg.tables, "Directory with table files from 'fill'")
        ->check(CLI::ExistingDirectory);
  };

  auto* fill = app.add_subcommand("fill", "Build the a, b and c tables");
  common(fill);
  tables(fill);
  fill->add_option("--n", cfg.n, "Basis size")->expected(1);

  auto* sga = app.add_subcommand("sga", "Run successive Galerkin approximation");
  common(sga);
  tables(sga);
  sga_opts(sga);
  sga->add_option("--n", cfg.n, "Basis size")->expected(1);

  auto* bench = app.add_subcommand("bench", "Time recurrence fill against full quadrature");
  common(bench);
  bench->add_option("--n", cfg.n, "Basis sizes (repeatable)")->expected(1, 16);

  auto* verify = app.add_subcommand("verify", "Check operators against quadrature tables");
  common(verify);
  verify->add_option("--n", cfg.n, "Table size")->expected(1);
  verify->add_option("--tol", cfg.tol, "Normalized residual tolerance")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Write value, residual and trajectory CSVs");
  common(sim);
  tables(sim);
  sga_opts(sim);
  sim->add_option("--n", cfg.n, "Basis sizes (repeatable)")->expected(1, 16);
  sim->add_option("--result", cfg.result, "SGA result file")->check(CLI::ExistingFile);
  sim->add_option("--x0", cfg.x0, "Initial state");
  sim->add_option("--tend", cfg.t_end, "Final time")->check(CLI::PositiveNumber);
  sim->add_option("--dt", cfg.dt, "RK4 step")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fill) return cmd_fill(cfg, out, err);
    if (*sga) return cmd_sga(cfg, out, err);
    if (*bench) return cmd_bench(cfg, out, err);
    if (*verify) return cmd_verify(cfg, out, err);
    if (*sim) return cmd_simulate(cfg, out, err);
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << '\n';
    return kUsage;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kUsage;
  } catch (const SingularityError& ex) {
    err << "singular system: " << ex.what() << '\n';
    return kSingular;
  } catch (const DivergenceError& ex) {
    err << "diverged: " << ex.what() << '\n';
    return kDiverged;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumerical;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace hjbrec::cli
