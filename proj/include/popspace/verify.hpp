#pragma once

#include <string>
#include <vector>

#include "popspace/io.hpp"
#include "popspace/opnorm.hpp"

namespace popspace {

enum class Suite {
  PComparison,
  OpnormBounds,
  Norm1Axioms,
  Norm1VsNorm2,
  Norm2TriangleSearch,
  PolarRoundtrip,
  PhiPsi,
  ExtensionGap,
};

const char* to_string(Suite s);
Suite suite_from_string(const std::string& name);

struct Budgets {
  int restarts = 4;
  int iterations = 80;
  Index r_max = 0;  // 0: per-size default
};

// A fully specified sweep: identical campaigns produce identical reports.
struct Campaign {
  Suite suite = Suite::PComparison;
  std::vector<double> p_list = {1.5, 3.0};
  int n_max = 4;
  long long trials = 100;
  std::uint64_t seed = 42;
  Budgets budgets;
};

struct CaseRecord {
  std::string id;
  std::uint64_t input_hash = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs/rhs - 1 where applicable
  bool violation = false;
  bool finding = false;
};

// Everything needed to replay a violating case exactly.
struct ReproBundle {
  std::string case_id;
  std::uint64_t seed = 0;
  Json inputs;
};

struct CampaignReport {
  std::string suite;
  long long cases_run = 0;
  long long findings = 0;
  double max_margin = -1.0;
  std::vector<CaseRecord> cases;
  std::vector<ReproBundle> violations;
  long long wall_clock_ms = 0;  // diagnostics only; never serialized

  bool ok() const { return violations.empty(); }
  Json to_json() const;
  std::string to_csv() const;
};

// Executes the suite over the grid p_list x sizes x trials. Suites for
// proved inequalities compare certified bounds in the sound direction
// only; exploratory suites record findings without asserting.
CampaignReport run_campaign(const Campaign& campaign);

struct ExtensionGapResult {
  double origin_lower = 0.0;          // level-L norm estimate of the map on V
  double best_extension_upper = 0.0;  // best level-L estimate over extensions
  double gap = 0.0;
  bool inconclusive = true;
  int level = 0;
};

// Estimates the level-L completely-bounded norm of a map given on a
// subspace V of M_k (scalar entries, operator p-norms) and searches over
// all linear extensions to M_k, parametrized by their values on a
// complement, for the smallest level-L estimate. The same seeded sample
// generator measures both sides, so V = W gives gap = 0 exactly.
ExtensionGapResult extension_gap(const std::vector<Matrix>& v_basis,
                                 const std::vector<Matrix>& images,
                                 const Exponent& e, int level,
                                 const Budgets& budgets = {},
                                 std::uint64_t seed = 42);

}  // namespace popspace
