#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "volboot/distributions.hpp"
#include "volboot/rng.hpp"

namespace volboot {

/// Near-integrated log stochastic volatility:
///   log s2_t = phi log s2_{t-1} + (1 - phi) log sigma_bar^2 + n^{-1/2} eta_{t-1},
///   phi = exp(-kappa / n),  eta ~ N(0, sigma_eta^2).
struct SvSpec {
  double kappa = 5.0;
  double sigma_bar = 1.0;
  double sigma_eta = std::sqrt(10.0);
  std::optional<double> initial_log_var;  // log s2_0, default log sigma_bar^2

  void validate() const;
  double initial_log_variance() const;
};

/// Near-integrated GARCH(1,1):
///   s2_t = omega_n + alpha_n s2_{t-1} z_{t-1}^2 + beta_n s2_{t-1}.
struct GarchSpec {
  double kappa = 5.0;
  double sigma_bar = 1.0;
  double sigma_eta = std::sqrt(10.0);
  std::optional<double> initial_var;  // s2_1, default sigma_bar^2

  void validate() const;
  double initial_variance() const;
};

/// Sample-size dependent GARCH coefficients.
struct GarchCoefficients {
  double omega;
  double alpha;
  double beta;

  /// omega = kappa sigma_bar^2 / n, alpha = sigma_eta / sqrt(2n),
  /// beta = 1 - kappa / n - alpha. Throws ConfigError if beta < 0.
  static GarchCoefficients at(const GarchSpec& spec, Eigen::Index n);
};

/// Compound-Poisson log volatility: sigma_t = exp(omega0 + omega1 J_t),
/// J_t = sum_{i<=t} delta_i eta_i, P(delta_i = 1) = lambda / n.
struct JumpSpec {
  double omega0 = 0.0;
  double omega1 = 0.5;
  double lambda = 2.0;
  InnovationLaw jump_law = InnovationLaw::Gaussian;

  void validate() const;
};

using VolatilitySpec = std::variant<SvSpec, GarchSpec, JumpSpec>;

std::string describe(const VolatilitySpec& spec);

/// Strictly positive per-period volatilities sigma_1..sigma_n.
struct VolatilityPath {
  Eigen::VectorXd sigmas;
  VolatilitySpec spec;
  // True when the generator consumed the innovations (GARCH).
  bool needs_z = false;

  Eigen::Index n() const { return sigmas.size(); }
  Eigen::VectorXd variances() const { return sigmas.array().square(); }
  // n^{-1} sum sigma_t^2
  double mean_variance() const { return sigmas.squaredNorm() / static_cast<double>(n()); }
};

VolatilityPath gen_sv_path(const SvSpec& spec, Eigen::Index n, const SeedPath& seed);

/// Uses z_1..z_{n-1}; s2_1 = spec.initial_variance().
VolatilityPath gen_garch_path(const GarchSpec& spec, Eigen::Index n, const InnovationDraw& z);

VolatilityPath gen_jump_path(const JumpSpec& spec, Eigen::Index n, const SeedPath& seed);

/// Number of jumps generated along a jump path of the given seed (diagnostic).
Eigen::Index count_jumps(const JumpSpec& spec, Eigen::Index n, const SeedPath& seed);

/// |z_t| recovered from consecutive variances,
///   z_t^2 = (s2_{t+1} - omega_n - beta_n s2_t) / (alpha_n s2_t),
/// for 1-based t in [1, n-1]. Tiny negative round-off is clamped to 0; anything
/// beyond that means the path was not generated by `spec` (NumericalError).
double garch_inverted_modulus(const GarchSpec& spec, const VolatilityPath& path, Eigen::Index t);

/// All n-1 recoverable moduli.
Eigen::VectorXd garch_inverted_moduli(const GarchSpec& spec, const VolatilityPath& path);

/// CSV with header "t,sigma"; t is 1-based.
void write_path_csv(std::ostream& os, const VolatilityPath& path);
Eigen::VectorXd read_path_csv(std::istream& is);

}  // namespace volboot
