#pragma once
#include <map>

#include "hjbrec/control.hpp"
#include "hjbrec/galerkin.hpp"
#include "hjbrec/pipeline.hpp"

namespace fixture {

inline const hjbrec::OperatorFile& sin_ops() {
  static const hjbrec::OperatorFile f =
      hjbrec::load_operator_file(std::filesystem::path(HJBREC_TEST_DATA_DIR) / "sin-system-operators.json");
  return f;
}

inline const hjbrec::GalerkinSystem& system(const std::string& problem, int n) {
  static std::map<std::pair<std::string, int>, hjbrec::GalerkinSystem> cache;
  auto it = cache.find({problem, n});
  if (it == cache.end()) {
    const auto spec = hjbrec::problem_by_label(problem);
    const auto t = hjbrec::build_tables(n, spec, problem == "sin-system" ? &sin_ops() : nullptr);
    it = cache.emplace(std::pair{problem, n}, hjbrec::assemble(t.a.table, t.b.table, t.c.table)).first;
  }
  return it->second;
}

inline const hjbrec::SgaResult& solved(const std::string& problem, int n) {
  static std::map<std::pair<std::string, int>, hjbrec::SgaResult> cache;
  auto it = cache.find({problem, n});
  if (it == cache.end()) {
    hjbrec::SgaConfig cfg;
    cfg.v0 = hjbrec::default_initial_guess(n);
    it = cache.emplace(std::pair{problem, n}, hjbrec::sga_run(system(problem, n), cfg)).first;
  }
  return it->second;
}

}  // namespace fixture
