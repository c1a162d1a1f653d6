#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "volboot/distributions.hpp"
#include "volboot/rng.hpp"

namespace volboot {

enum class DiffusionKind { LogOU, GarchDiffusion };

/// Sign convention of the drift kappa (x - x_bar):
///   MeanReverting  dx = -kappa (x - x_bar) du + ...
///   Printed        dx = +kappa (x - x_bar) du + ...
enum class DriftSign { MeanReverting, Printed };

/// Continuous-time volatility limit, x = log sigma^2 (LogOU) or
/// x = sigma^2 (GarchDiffusion):
///   LogOU:           dx = drift du + sigma_eta dB_eta
///   GarchDiffusion:  dx = drift du + sigma_eta x dB_eta
/// B_z is a Brownian motion with corr(dB_eta, dB_z) = correlation.
struct DiffusionSpec {
  DiffusionKind kind = DiffusionKind::GarchDiffusion;
  double kappa = 5.0;
  double sigma_bar = 1.0;
  double sigma_eta = std::sqrt(10.0);
  double correlation = 0.0;
  std::optional<double> initial_var;  // sigma^2(0), default sigma_bar^2
  DriftSign drift_sign = DriftSign::MeanReverting;
  // LogOU only: sample the Gaussian OU transition exactly instead of Euler.
  bool exact_ou = false;

  void validate() const;
  double initial_variance() const { return initial_var.value_or(sigma_bar * sigma_bar); }
};

std::string_view to_string(DiffusionKind kind);
DiffusionKind diffusion_kind_from_string(std::string_view s);

struct LimitFunctionals {
  double v1 = 0.0;            // int_0^1 sigma^2(u) du, left Riemann sum
  double m1 = 0.0;            // int_0^1 sigma(u) dB_z(u), Ito forward sum
  Eigen::VectorXd path_grid;  // sigma^2(k/steps), k = 0..steps, if requested
};

inline constexpr int kMinOracleSteps = 100;

/// One Euler-Maruyama replicate with step 1/steps. Throws NumericalError if a
/// GarchDiffusion variance step lands at or below zero.
LimitFunctionals simulate_limit(const DiffusionSpec& spec, int steps, const SeedPath& seed,
                                bool keep_path = false);

/// simulate_limit, retried with doubled step counts (up to `max_refinements`
/// times) after a positivity failure.
LimitFunctionals simulate_limit_refined(const DiffusionSpec& spec, int steps,
                                        const SeedPath& seed, int max_refinements = 4);

/// Phi(Phi^{-1}(alpha) - c v1^{-1/2}).
double local_power_formula(double alpha, double c, double v1);

struct OracleConfig {
  DiffusionSpec spec;
  int steps = 10000;
  int reps = 2000;
  Eigen::Index discrete_n = 20000;
  InnovationLaw dgp = InnovationLaw::Gaussian;  // discrete GARCH innovations
  std::uint64_t master_seed = 42;
  unsigned threads = 1;

  void validate() const;
};

struct OracleComparison {
  std::vector<double> limit_v1, limit_m1;
  std::vector<double> discrete_v1, discrete_m1;
  double ks_v1 = 0.0;
  double ks_m1 = 0.0;
};

/// Functionals from the discrete recursion at n = discrete_n:
/// v1 = n^{-1} sum sigma_t^2, m1 = n^{-1/2} sum sigma_t z_t.
std::pair<double, double> discrete_functionals(const OracleConfig& config, const SeedPath& seed);

OracleComparison compare_discrete_to_limit(const OracleConfig& config);

}  // namespace volboot
