#pragma once

#include <cstdint>

#include "nlap/operators.hpp"

namespace nlap {

/// Every explicit constant of the sphere-coercivity certificate, together
/// with the derived radius r, threshold lambda*, margin rho and continuation
/// start index n*. The embedding constants are discrete estimates: the
/// largest norm ratio seen over a probe family, inflated by a safety factor.
/// All downstream guarantees are certificates relative to these estimates.
struct ConstantsReport {
  int N = 2;
  double alpha_n = 0.0;      // N omega_{N-1}^{1/(N-1)}
  double omega_nm1 = 0.0;    // surface measure of the unit (N-1)-sphere
  double l_estimate = 1.0;   // exponential-integral envelope, >= 1
  double domain_measure = 0.0;

  // norm-ratio estimates ||u||_target / ||u||_{W^{1,N}_0}
  double cemb1 = 0.0;  // L^{r1+1}
  double cemb2 = 0.0;  // L^{N/(N-r2)}
  double cemb3 = 0.0;  // L^{N'(r3+1)}
  double cemb4 = 0.0;  // L^1
  double cemb5 = 0.0;  // tail constant a3 2^{r3-1} (from the small-|s| growth bound)

  // constants as they enter the estimates
  double c1_power = 0.0;    // cemb1^{r1+1}
  double c2_convection = 0.0;  // cemb2
  double c3_exponential = 0.0; // a3 2^{r3} cemb3^{r3+1}
  double c4_forcing = 0.0;     // cemb4
  double c5_tail = 0.0;        // cemb5

  double safety = 2.0;
  double r = 0.0;
  double lambda_star = 0.0;
  double rho = 0.0;  // margin at the configured lambda
  std::int64_t n_star = 0;
};

/// omega_{N-1} = 2 pi^{N/2} / Gamma(N/2).
double sphere_surface_measure(int N);

/// alpha_N = N omega_{N-1}^{1/(N-1)}, the critical exponential coefficient.
double alpha_n(int N);

/// Largest ratio ||u||_{L^p} / ||u||_{W^{1,N}_0} over deterministic and
/// random probe fields on the space and all coarser spaces in its chain
/// (coarse probes are prolonged, so the estimate grows with refinement).
/// The result is inflated by `safety`.
double embedding_ratio(const SpacePtr& space, double p, int trials, std::uint64_t seed,
                       const QuadratureRule& rule, double safety = 2.0);

/// max over the probe family of int_Omega exp(sigma |u|^{N/(N-1)}) dx.
/// Probes are used as given (normalize beforehand); exp overflow makes the
/// probe count as +infinity rather than raising an error.
double tm_probe(const GalerkinSpace& space, double sigma, const std::vector<Vector>& family,
                const QuadratureRule& rule);

/// Truncated-log (Moser) probe: min(sqrt(T), log(R/rho)/sqrt(T)) around the
/// domain center, truncation radius delta relative to the inradius,
/// T = log(1/delta); interpolated and normalized to unit W^{1,N}_0 norm.
Vector moser_probe(const GalerkinSpace& space, double delta);

/// Probe family for calibrating the exponential envelope: the zero field,
/// Moser probes at a few resolvable truncations, an interpolated smooth bump
/// and seeded random fields, all normalized (except zero).
std::vector<Vector> tm_probe_family(const GalerkinSpace& space, int random_count,
                                    std::uint64_t seed);

/// r = min{ 1/(2 (2 C3 L^{1/N})^{1/(r3+1-N)}), (1/2) (alpha_N/(N alpha))^{(N-1)/N} }.
double compute_r(double c3_exponential, double l_estimate, const ProblemSpec& spec);

/// lambda* = (1/2) r^N / (2 a1 C1 r^{r1+1} + 2 a2 C2 r^{r2+1}).
double compute_lambda_star(double r, const ProblemSpec& spec, double c1_power,
                           double c2_convection);

/// rho(lambda) = r^N/2 - lambda (a1 C1 r^{r1+1} + a2 C2 r^{r2+1}).
double rho_margin(double lambda, double r, const ProblemSpec& spec, double c1_power,
                  double c2_convection);

/// Left-hand side of the tail condition:
///   C4 r / n + lambda a1 |Omega| / n^{r1+1} + C5 exp(2^{N/(N-1)} alpha) |Omega| / n^2
///   + |Omega| / n^2.
double n_star_lhs(std::int64_t n, double rho, double r, const ProblemSpec& spec,
                  double c4_forcing, double c5_tail, double domain_measure);

/// Smallest n with n_star_lhs(n) < rho/2 (the LHS is decreasing in n).
std::int64_t compute_n_star(double rho, double r, const ProblemSpec& spec, double c4_forcing,
                            double c5_tail, double domain_measure);

/// Full certificate for a problem on the given probe space.
ConstantsReport compute_constants(const ProblemSpec& spec, const SpacePtr& probe_space,
                                  int trials, std::uint64_t seed, const QuadratureRule& rule,
                                  double safety = 2.0);

}  // namespace nlap
