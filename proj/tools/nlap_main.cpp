// nlap: Galerkin solver for N-Laplacian Dirichlet problems with
// exponential-growth reaction and gradient (convection) terms.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlap/pipeline.hpp"

namespace {

using nlap::json;

struct CommonArgs {
  std::string config_path;
  double lambda = -1.0;
  int level = -1;
  long long seed = -1;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "JSON configuration file");
  cmd->add_option("--lambda", args.lambda, "override problem.lambda");
  cmd->add_option("--level", args.level, "override discretization.max_level");
  cmd->add_option("--seed", args.seed, "override seed");
  cmd->add_option("-o,--output", args.output_dir, "override output directory");
}

nlap::RunConfig load_config(const CommonArgs& args) {
  json j = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw nlap::ConfigError("config: cannot open '" + args.config_path + "'");
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw nlap::ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
  }
  nlap::RunConfig cfg = nlap::RunConfig::from_json(j);
  if (args.lambda >= 0.0) cfg.problem.lambda = args.lambda;
  if (args.level >= 0) cfg.max_level = args.level;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
  cfg.problem.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw nlap::Error("cannot open '" + path + "' for writing");
  out << text;
}

int run_solve_once(nlap::RunConfig cfg, const std::string& suffix) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  nlap::PipelineResult result = nlap::run_pipeline(cfg);
  const std::string report_path =
      (fs::path(cfg.output_dir) / ("report" + suffix + ".json")).string();
  write_text(report_path, result.report.to_json().dump(2) + "\n");
  if (result.space) {
    nlap::DiscreteField field(result.space, result.xi);
    nlap::write_field_csv(field,
                          (fs::path(cfg.output_dir) / ("solution" + suffix + ".csv")).string());
    if (result.subsolution)
      nlap::write_field_csv(*result.subsolution,
                            (fs::path(cfg.output_dir) / ("v0" + suffix + ".csv")).string());
  }
  if (result.report.status != "ok") {
    std::cerr << "pipeline failed at " << result.report.status << "\n";
    return 1;
  }
  std::cout << "report written to " << report_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin solver for the N-Laplacian Dirichlet problem\n"
               "  -div(|grad u|^{N-2} grad u) = lambda (a1 u^{r1} + a2 |grad u|^{r2}) + f(u)\n"
               "with exponential-growth f, ball-constrained root finding and double\n"
               "continuation in the space level and the regularization index."};
  app.require_subcommand(1);

  CommonArgs args;
  bool force = false;
  std::string sweep;
  std::string suite;

  CLI::App* c_constants = app.add_subcommand("constants", "compute the certificate constants");
  add_common(c_constants, args);

  CLI::App* c_solve = app.add_subcommand("solve", "run the full solve pipeline");
  add_common(c_solve, args);
  c_solve->add_flag("--force", force, "run outside the certified lambda range");
  c_solve->add_option("--sweep", sweep, "lambda sweep min:max:steps, one report per value");

  CLI::App* c_check = app.add_subcommand("check", "run the module property suites");
  add_common(c_check, args);
  c_check->add_option("--suite", suite, "run a single suite");

  CLI::App* c_sub = app.add_subcommand("subsolution", "solve the sublinear comparison problem");
  add_common(c_sub, args);

  CLI::App* c_mesh = app.add_subcommand("mesh-export", "write vertex/element CSV files");
  add_common(c_mesh, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_constants->parsed()) {
      const nlap::RunConfig cfg = load_config(args);
      try {
        const nlap::ConstantsReport rep = nlap::run_constants(cfg);
        std::cout << nlap::constants_to_json(rep).dump(2) << "\n";
        return 0;
      } catch (const nlap::RegimeError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
      }
    }

    if (c_solve->parsed()) {
      nlap::RunConfig cfg = load_config(args);
      cfg.force = cfg.force || force;
      if (sweep.empty()) {
        try {
          return run_solve_once(cfg, "");
        } catch (const nlap::RegimeError& e) {
          std::cerr << "rejected: " << e.what() << "\n";
          return 2;
        }
      }
      double lo, hi;
      int steps;
      {
        std::istringstream ss(sweep);
        char c1, c2;
        if (!(ss >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 1)
          throw nlap::ConfigError("--sweep expects min:max:steps");
      }
      int rc = 0;
      for (int i = 0; i < steps; ++i) {
        nlap::RunConfig one = cfg;
        one.problem.lambda = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
        std::ostringstream suffix;
        suffix.precision(6);
        suffix << "_lambda_" << one.problem.lambda;
        try {
          rc |= run_solve_once(one, suffix.str());
        } catch (const nlap::RegimeError& e) {
          std::cerr << "lambda " << one.problem.lambda << " rejected: " << e.what() << "\n";
          rc |= 2;
        }
      }
      return rc == 0 ? 0 : 1;
    }

    if (c_check->parsed()) {
      const nlap::RunConfig cfg = load_config(args);
      const auto suites = nlap::run_check_suites(cfg, suite);
      int failed = 0;
      for (const auto& s : suites) {
        std::cout << s.name << ": " << s.passed << " passed, " << s.failed << " failed\n";
        for (const auto& f : s.failures) std::cout << "  FAIL " << f << "\n";
        failed += s.failed;
      }
      return failed == 0 ? 0 : 1;
    }

    if (c_sub->parsed()) {
      const nlap::RunConfig cfg = load_config(args);
      const auto space = nlap::make_space(cfg.problem.domain, cfg.max_level);
      const auto rule = nlap::simplex_rule(cfg.problem.N, cfg.quad_degree);
      const nlap::SubsolutionField v0 = nlap::solve_p5(cfg.problem, space, 1e-8, rule);
      std::filesystem::create_directories(cfg.output_dir);
      const std::string path =
          (std::filesystem::path(cfg.output_dir) / "v0.csv").string();
      nlap::write_field_csv(v0.v0, path);
      std::cout << json{{"energy", v0.energy},
                        {"gradient_norm", v0.gradient_norm},
                        {"positivity_margin", v0.positivity_margin},
                        {"iterations", v0.iterations},
                        {"field", path}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (c_mesh->parsed()) {
      const nlap::RunConfig cfg = load_config(args);
      std::filesystem::create_directories(cfg.output_dir);
      const auto mesh = nlap::build_mesh(cfg.problem.domain, cfg.max_level);
      namespace fs = std::filesystem;
      const std::string v = (fs::path(cfg.output_dir) / "vertices.csv").string();
      const std::string e = (fs::path(cfg.output_dir) / "elements.csv").string();
      nlap::write_mesh_csv(mesh, v, e);
      std::cout << "wrote " << v << " and " << e << "\n";
      return 0;
    }
  } catch (const nlap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
