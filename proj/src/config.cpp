#include "nlap/config.hpp"

#include <fstream>

namespace nlap {

namespace {

template <typename T>
T field_or(const json& j, const std::string& key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

template <typename T>
T required_field(const json& j, const std::string& key, const std::string& section) {
  if (!j.contains(key))
    throw ConfigError("config: missing field '" + key + "' in section '" + section + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + key + "' in section '" + section +
                      "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  const json problem = j.contains("problem") ? j.at("problem") : json::object();
  cfg.problem.N = field_or<int>(problem, "N", 2);
  cfg.problem.domain = parse_domain(field_or<std::string>(
      problem, "domain", cfg.problem.N == 3 ? "unit_cube" : "unit_square"));
  cfg.problem.lambda = field_or<double>(problem, "lambda", 0.0);
  cfg.problem.a1 = field_or<double>(problem, "a1", 1.0);
  cfg.problem.a2 = field_or<double>(problem, "a2", 0.0);
  cfg.problem.r1 = field_or<double>(problem, "r1", 0.5);
  cfg.problem.r2 = field_or<double>(problem, "r2", 0.5);

  const json nl = j.contains("nonlinearity") ? j.at("nonlinearity") : json::object();
  cfg.nonlinearity_kind = field_or<std::string>(nl, "kind", "exp_critical");
  const double a3 = field_or<double>(nl, "a3", 1.0);
  const double alpha = field_or<double>(nl, "alpha", 1.0);
  const double r3 = required_field<double>(nl, "r3", "nonlinearity");
  cfg.power_p = field_or<double>(nl, "p", 1.0);
  if (cfg.nonlinearity_kind == "table") {
    cfg.table_path = required_field<std::string>(nl, "path", "nonlinearity");
    cfg.problem.nonlinearity =
        tabulated_nonlinearity_from_csv(cfg.table_path, cfg.problem.N, a3, alpha, r3);
  } else {
    cfg.problem.nonlinearity =
        catalog_nonlinearity(cfg.nonlinearity_kind, cfg.problem.N, cfg.power_p, a3, alpha, r3);
  }

  const json disc = j.contains("discretization") ? j.at("discretization") : json::object();
  cfg.max_level = field_or<int>(disc, "max_level", 3);
  cfg.quad_degree = field_or<int>(disc, "quadrature_degree", 5);
  if (cfg.max_level < 1) throw ConfigError("config: max_level must be >= 1");
  if (cfg.quad_degree < 4) throw ConfigError("config: quadrature_degree must be >= 4");

  const json sched = j.contains("schedule") ? j.at("schedule") : json::object();
  cfg.n_list = field_or<std::vector<std::int64_t>>(sched, "n_list", {});
  cfg.max_stages = field_or<int>(sched, "max_stages", 42);
  cfg.stage_tol = field_or<double>(sched, "stage_tol", 0.0);
  cfg.continuation_tol = field_or<double>(sched, "continuation_tol", 1e-6);
  cfg.weak_form_target = field_or<double>(sched, "weak_form_target", 1e-6);

  const json cons = j.contains("constants") ? j.at("constants") : json::object();
  cfg.trials = field_or<int>(cons, "trials", 128);
  cfg.safety = field_or<double>(cons, "safety", 2.0);
  cfg.num_dirs = field_or<int>(cons, "num_dirs", 256);
  if (cfg.trials < 100) throw ConfigError("config: constants.trials must be >= 100");

  cfg.comparison_slack = field_or<double>(j, "comparison_slack", 1e-3);
  cfg.seed = field_or<std::uint64_t>(j, "seed", 0);
  cfg.output_dir = field_or<std::string>(j, "output_dir", ".");
  cfg.force = field_or<bool>(j, "force", false);

  cfg.problem.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return from_json(j);
}

json RunConfig::echo() const {
  json j;
  j["problem"] = {{"N", problem.N},
                  {"domain", domain_name(problem.domain)},
                  {"lambda", problem.lambda},
                  {"a1", problem.a1},
                  {"a2", problem.a2},
                  {"r1", problem.r1},
                  {"r2", problem.r2}};
  j["nonlinearity"] = {{"kind", nonlinearity_kind},
                       {"a3", problem.nonlinearity.a3},
                       {"alpha", problem.nonlinearity.alpha},
                       {"r3", problem.nonlinearity.r3}};
  if (nonlinearity_kind == "power") j["nonlinearity"]["p"] = power_p;
  if (!table_path.empty()) j["nonlinearity"]["path"] = table_path;
  j["discretization"] = {{"max_level", max_level}, {"quadrature_degree", quad_degree}};
  j["schedule"] = {{"n_list", n_list},
                   {"max_stages", max_stages},
                   {"stage_tol", effective_stage_tol()},
                   {"continuation_tol", continuation_tol},
                   {"weak_form_target", weak_form_target}};
  j["constants"] = {{"trials", trials}, {"safety", safety}, {"num_dirs", num_dirs}};
  // output_dir is deliberately not echoed: reports stay byte-identical
  // across runs that differ only in where they are written
  j["comparison_slack"] = comparison_slack;
  j["seed"] = seed;
  j["force"] = force;
  return j;
}

}  // namespace nlap
