#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "sns/field.hpp"

namespace sns {

struct CheckRecord {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  // empty, or e.g. UNDERPOWERED
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckRecord> checks;
  bool all_pass = true;
  int underpowered = 0;
};

struct VerifyOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  int grid_n = 64;
  std::string out_dir;  // where auxiliary artefacts (profile CSVs) go
};

// Suites: paracalc, noise, operator, energy, galerkin.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);

// One JSON object per line: {"check":..., "value":..., "tolerance":..., "pass":...}.
void write_jsonl(const SuiteResult& result, std::ostream& os);

// Deterministic pseudo-random smooth test field (spectral decay |k|^-decay).
VectorField random_field(GridPtr grid, std::uint64_t seed, std::uint64_t index, double decay,
                         bool div_free);

// Worker count for Monte-Carlo loops: min(SNS_THREADS, hardware, jobs),
// at least 1.  Results are reduced in index order, so the thread count
// never changes numerics.
int worker_count(std::size_t jobs);

// Runs fn(i) for i in [0, count) on worker_count(count) threads.
void parallel_for_indexed(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace sns
