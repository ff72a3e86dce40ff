#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlap/pipeline.hpp"

namespace py = pybind11;
using namespace nlap;

namespace {

RunConfig config_from_string(const std::string& text) {
  return RunConfig::from_json(json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Galerkin solver for N-Laplacian Dirichlet problems with "
            "exponential nonlinearity and convection";

  m.def("alpha_n", &alpha_n, py::arg("N"),
        "critical exponential coefficient N * omega_{N-1}^{1/(N-1)}");
  m.def("sphere_surface_measure", &sphere_surface_measure, py::arg("N"));

  m.def(
      "mesh_counts",
      [](const std::string& domain, int level) {
        const SimplexMesh mesh = build_mesh(parse_domain(domain), level);
        return py::make_tuple(mesh.vertex_count(), mesh.element_count(),
                              mesh.interior_vertex_count());
      },
      py::arg("domain"), py::arg("level"),
      "(vertices, elements, interior vertices) of the structured mesh");

  m.def(
      "xi_norm",
      [](const std::string& domain, int level, const std::vector<double>& xi) {
        const SpacePtr space = make_space(parse_domain(domain), level);
        return xi_norm(*space, xi);
      },
      py::arg("domain"), py::arg("level"), py::arg("xi"),
      "W^{1,N}_0 norm of the coefficient vector on the level's hat basis");

  m.def(
      "fk_eval",
      [](const std::string& kind, int N, double p, double a3, double alpha, double r3,
         std::int64_t k, const std::vector<double>& points) {
        const auto reg = make_fk(catalog_nonlinearity(kind, N, p, a3, alpha, r3), k);
        std::vector<double> out;
        out.reserve(points.size());
        for (double s : points) out.push_back(reg(s));
        return out;
      },
      py::arg("kind"), py::arg("N"), py::arg("p"), py::arg("a3"), py::arg("alpha"),
      py::arg("r3"), py::arg("k"), py::arg("points"),
      "evaluate the Lipschitz regularization f_k of a catalog nonlinearity");

  m.def(
      "constants_report",
      [](const std::string& config_json) {
        const RunConfig cfg = config_from_string(config_json);
        const SpacePtr space = make_space(cfg.problem.domain, cfg.max_level);
        const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
        return constants_to_json(compute_constants(cfg.problem, space, cfg.trials, cfg.seed,
                                                   rule, cfg.safety))
            .dump();
      },
      py::arg("config_json"), "certificate constants as a JSON string");

  m.def(
      "solve",
      [](const std::string& config_json) {
        return run_pipeline(config_from_string(config_json)).report.to_json().dump();
      },
      py::arg("config_json"), "full pipeline; returns the report as a JSON string");

  m.def(
      "solve_subsolution",
      [](const std::string& config_json) {
        const RunConfig cfg = config_from_string(config_json);
        const SpacePtr space = make_space(cfg.problem.domain, cfg.max_level);
        const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
        const SubsolutionField v0 = solve_p5(cfg.problem, space, 1e-8, rule);
        return json{{"energy", v0.energy},
                    {"gradient_norm", v0.gradient_norm},
                    {"positivity_margin", v0.positivity_margin},
                    {"iterations", v0.iterations},
                    {"nodal_values", v0.v0.nodal_values()}}
            .dump();
      },
      py::arg("config_json"), "solve the sublinear comparison problem");

  m.def(
      "check",
      [](const std::string& config_json, const std::string& suite) {
        const auto suites = run_check_suites(config_from_string(config_json), suite);
        json out = json::array();
        for (const auto& s : suites)
          out.push_back({{"name", s.name},
                         {"passed", s.passed},
                         {"failed", s.failed},
                         {"failures", s.failures}});
        return out.dump();
      },
      py::arg("config_json"), py::arg("suite") = std::string(),
      "run the module property suites");

  py::register_exception<ConfigError>(m, "ConfigError");
}
