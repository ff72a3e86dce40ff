#pragma once

#include "nlap/config.hpp"
#include "nlap/solver.hpp"
#include "nlap/subsolution.hpp"

namespace nlap {

json constants_to_json(const ConstantsReport& rep);
json certificate_to_json(const CoercivityCertificate& cert);
json stage_to_json(const StageRecord& rec);

/// Regime rejection: lambda >= lambda* without --force.
struct RegimeError : ConfigError {
  RegimeError(const std::string& what, double lambda_star)
      : ConfigError(what), lambda_star(lambda_star) {}
  double lambda_star = 0.0;
};

/// Full solve record. Serialization is schema-stable and carries no
/// timestamps, so identical runs produce identical bytes.
struct SolveReport {
  json config_echo;
  ConstantsReport constants;
  CoercivityCertificate certificate;
  std::vector<StageRecord> refinement_stages;
  std::vector<double> refinement_diffs;
  bool refinement_diffs_decreasing = true;
  std::vector<StageRecord> continuation_stages;
  std::vector<double> continuation_diffs;
  std::int64_t final_n = 0;
  double final_xi_norm = 0.0;
  double ball_radius = 0.0;
  bool a_priori_bound_held = false;
  NegativePartVerdict negative_part;
  double weak_form_defect = -1.0;
  bool comparison_ran = false;
  ComparisonVerdict comparison;
  double subsolution_energy = 0.0;
  double subsolution_margin = 0.0;
  bool force_used = false;
  std::string status = "ok";

  json to_json() const;
};

/// Constants subcommand: certificate for the configured problem on the
/// max-level probe space. Throws RegimeError when lambda >= lambda* (unless
/// forced).
ConstantsReport run_constants(const RunConfig& cfg);

struct PipelineResult {
  SolveReport report;
  SpacePtr space;
  Vector xi;
  std::optional<DiscreteField> subsolution;
};

/// Full pipeline: constants -> coercivity certificate -> refinement in m at
/// the starting n -> continuation in n -> negative-part, comparison and
/// weak-form checks.
PipelineResult run_pipeline(const RunConfig& cfg);

struct SuiteResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  std::vector<std::string> failures;
};

/// Property suites behind the `check` subcommand. `filter` is empty for all
/// suites or one of: hypothesisF, fk, norm, operators, constants, tm.
std::vector<SuiteResult> run_check_suites(const RunConfig& cfg, const std::string& filter);

}  // namespace nlap
