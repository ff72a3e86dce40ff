#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlap/operators.hpp"

namespace nlap {

using json = nlohmann::json;

/// Parsed run configuration: problem data plus discretization, schedule and
/// output choices. JSON file first, then flag overrides.
struct RunConfig {
  ProblemSpec problem;
  int max_level = 3;
  int quad_degree = 5;

  // schedule
  std::vector<std::int64_t> n_list;  // empty: geometric, starting at max(n*, 10)
  int max_stages = 42;
  double stage_tol = 0.0;  // 0: pick by N (1e-10, 1e-8 for N=3)
  double continuation_tol = 1e-6;
  double weak_form_target = 1e-6;

  // constants estimation
  int trials = 128;
  double safety = 2.0;
  int num_dirs = 256;

  double comparison_slack = 1e-3;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  bool force = false;

  // nonlinearity selection (kept for the report echo)
  std::string nonlinearity_kind = "exp_critical";
  double power_p = 1.0;
  std::string table_path;

  static RunConfig from_json(const json& j);
  static RunConfig from_file(const std::string& path);
  json echo() const;

  double effective_stage_tol() const { return stage_tol > 0.0 ? stage_tol : (problem.N >= 3 ? 1e-8 : 1e-10); }
};

}  // namespace nlap
