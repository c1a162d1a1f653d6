#pragma once

#include <Eigen/Core>

#include <nlohmann/json.hpp>

#include "volboot/distributions.hpp"
#include "volboot/rng.hpp"
#include "volboot/statistics.hpp"

namespace volboot {

struct BootstrapConfig {
  int B = 199;
  MultiplierLaw law = MultiplierLaw::GaussianStd;
  SeedPath seed{0};

  void validate() const;
  /// Multiplier stream for replicate b (1-based).
  SeedPath replicate_seed(int b) const { return seed.child(Level::Bootstrap, static_cast<std::uint64_t>(b)); }
};

struct BootstrapRun {
  StatKind stat = StatKind::S;
  Tail tail = Tail::Left;
  double tau_n = 0.0;
  Eigen::VectorXd tau_star;  // indexed by b - 1
  double p_value = 1.0;

  int B() const { return static_cast<int>(tau_star.size()); }
  /// Serialized fields: stat, tail, tau_n, B, p_value and, if requested,
  /// tau_star.
  nlohmann::json to_json(bool include_tau_star = false) const;
};

/// Residuals the bootstrap shocks are built from:
///   Location:  y_t - theta_bar  (null imposed)
///   Cusum:     y_t - ybar       (demeaned)
///   UnitRoot:  dy_t, y_0 = 0    (unit root imposed)
Eigen::VectorXd residuals_for(Problem problem, const Sample& sample);

/// eps*_t = residual_t w*_t with multipliers from config.replicate_seed(b).
Eigen::VectorXd wild_resample(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                              const BootstrapConfig& config, int b);

/// Bootstrap analog of `kind` on bootstrap shocks eps*. Location and CUSUM
/// statistics are computed on y* = eps*; unit-root statistics on the
/// cumulated y*_t = y*_{t-1} + eps*_t, y*_0 = 0. Tnull* uses the uncentred
/// scale sqrt(U*_n(1)).
double bootstrap_statistic(StatKind kind, const Eigen::Ref<const Eigen::VectorXd>& eps_star);

/// Left:  (1 + #{tau*_b <= tau_n}) / (B + 1)
/// Right: (1 + #{tau*_b >= tau_n}) / (B + 1)
double p_value(double tau_n, const Eigen::Ref<const Eigen::VectorXd>& tau_star, Tail tail);

BootstrapRun run_bootstrap(StatKind kind, const Sample& sample, const BootstrapConfig& config);

/// Same as run_bootstrap but reuses caller-owned scratch buffers and skips
/// storing tau_star; returns only the p-value. Used by the Monte Carlo loops.
class BootstrapWorkspace {
 public:
  double p_value(StatKind kind, const Sample& sample, const BootstrapConfig& config);

 private:
  Eigen::VectorXd residuals_;
  Eigen::VectorXd multipliers_;
  Eigen::VectorXd shocks_;
};

}  // namespace volboot
