#include "volboot/limitoracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/normal_distribution.hpp>

#include "volboot/errors.hpp"
#include "volboot/montecarlo.hpp"
#include "volboot/parallel.hpp"
#include "volboot/volatility.hpp"

namespace volboot {

void DiffusionSpec::validate() const {
  if (!(kappa >= 0.0)) throw ConfigError("diffusion: kappa must be >= 0");
  if (!(sigma_bar > 0.0)) throw ConfigError("diffusion: sigma_bar must be > 0");
  if (!(sigma_eta >= 0.0)) throw ConfigError("diffusion: sigma_eta must be >= 0");
  if (!(std::abs(correlation) <= 1.0)) throw ConfigError("diffusion: |correlation| must be <= 1");
  if (!(initial_variance() > 0.0)) throw ConfigError("diffusion: initial variance must be > 0");
}

std::string_view to_string(DiffusionKind kind) {
  return kind == DiffusionKind::LogOU ? "logou" : "garch";
}

DiffusionKind diffusion_kind_from_string(std::string_view s) {
  if (s == "logou" || s == "sv") return DiffusionKind::LogOU;
  if (s == "garch") return DiffusionKind::GarchDiffusion;
  throw ConfigError("unknown diffusion kind '" + std::string(s) + "' (expected garch or logou)");
}

LimitFunctionals simulate_limit(const DiffusionSpec& spec, int steps, const SeedPath& seed,
                                bool keep_path) {
  spec.validate();
  if (steps < kMinOracleSteps) {
    throw ConfigError("simulate_limit: steps must be >= " + std::to_string(kMinOracleSteps));
  }
  const double dt = 1.0 / static_cast<double>(steps);
  const double root_dt = std::sqrt(dt);
  const double rate = spec.drift_sign == DriftSign::MeanReverting ? -spec.kappa : spec.kappa;
  const double rho = spec.correlation;
  const double rho_c = std::sqrt(1.0 - rho * rho);
  const double bar_var = spec.sigma_bar * spec.sigma_bar;

  Xoshiro256pp engine(seed);
  boost::random::normal_distribution<double> normal;

  LimitFunctionals out;
  if (keep_path) out.path_grid.resize(steps + 1);

  if (spec.kind == DiffusionKind::LogOU) {
    const double x_bar = std::log(bar_var);
    // Exact OU transition over dt: x' = x_bar + (x - x_bar) e^{rate dt} + sd Z.
    const double decay = std::exp(rate * dt);
    const double exact_sd =
        rate == 0.0 ? spec.sigma_eta * root_dt
                    : spec.sigma_eta * std::sqrt(std::expm1(2.0 * rate * dt) / (2.0 * rate));
    double x = std::log(spec.initial_variance());
    for (int k = 0; k < steps; ++k) {
      const double var = std::exp(x);
      if (keep_path) out.path_grid[k] = var;
      const double z_eta = normal(engine);
      const double z_z = rho * z_eta + rho_c * normal(engine);
      out.v1 += var * dt;
      out.m1 += std::sqrt(var) * root_dt * z_z;
      if (spec.exact_ou) {
        x = x_bar + (x - x_bar) * decay + exact_sd * z_eta;
      } else {
        x += rate * (x - x_bar) * dt + spec.sigma_eta * root_dt * z_eta;
      }
    }
    if (keep_path) out.path_grid[steps] = std::exp(x);
  } else {
    double var = spec.initial_variance();
    for (int k = 0; k < steps; ++k) {
      if (keep_path) out.path_grid[k] = var;
      const double z_eta = normal(engine);
      const double z_z = rho * z_eta + rho_c * normal(engine);
      out.v1 += var * dt;
      out.m1 += std::sqrt(var) * root_dt * z_z;
      var += rate * (var - bar_var) * dt + spec.sigma_eta * var * root_dt * z_eta;
      if (!(var > 0.0)) {
        throw NumericalError("simulate_limit: GARCH diffusion variance left (0, inf) at step " +
                             std::to_string(k + 1) + " of " + std::to_string(steps));
      }
    }
    if (keep_path) out.path_grid[steps] = var;
  }
  return out;
}

LimitFunctionals simulate_limit_refined(const DiffusionSpec& spec, int steps,
                                        const SeedPath& seed, int max_refinements) {
  for (int attempt = 0;; ++attempt) {
    try {
      return simulate_limit(spec, steps, seed.child(Level::Grid, static_cast<std::uint64_t>(attempt)));
    } catch (const NumericalError&) {
      if (attempt >= max_refinements) throw;
      steps *= 2;
    }
  }
}

double local_power_formula(double alpha, double c, double v1) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("local_power_formula: alpha in (0,1)");
  if (!(v1 > 0.0)) throw ConfigError("local_power_formula: v1 must be > 0");
  const boost::math::normal_distribution<double> std_normal;
  if (std::isinf(v1)) return alpha;
  return boost::math::cdf(std_normal, boost::math::quantile(std_normal, alpha) - c / std::sqrt(v1));
}

void OracleConfig::validate() const {
  spec.validate();
  if (steps < kMinOracleSteps) {
    throw ConfigError("oracle: steps must be >= " + std::to_string(kMinOracleSteps));
  }
  if (reps < 1) throw ConfigError("oracle: reps must be >= 1");
  if (discrete_n < 2) throw ConfigError("oracle: discrete n must be >= 2");
  if (spec.kind == DiffusionKind::GarchDiffusion && spec.sigma_eta > 0.0) {
    GarchCoefficients::at({spec.kappa, spec.sigma_bar, spec.sigma_eta, spec.initial_var},
                          discrete_n);
  }
}

std::pair<double, double> discrete_functionals(const OracleConfig& config, const SeedPath& seed) {
  const DiffusionSpec& s = config.spec;
  const Eigen::Index n = config.discrete_n;
  VolatilityPath path;
  InnovationDraw z;
  if (s.kind == DiffusionKind::GarchDiffusion) {
    z = draw_innovations(config.dgp, n, seed.child(Level::Innovation, 0));
    path = gen_garch_path({s.kappa, s.sigma_bar, s.sigma_eta, s.initial_var}, n, z);
  } else {
    SvSpec sv{s.kappa, s.sigma_bar, s.sigma_eta, std::log(s.initial_variance())};
    path = gen_sv_path(sv, n, seed.child(Level::Volatility, 0));
    z = draw_innovations(config.dgp, n, seed.child(Level::Innovation, 0));
  }
  const double m1 = path.sigmas.dot(z.z) / std::sqrt(static_cast<double>(n));
  return {path.mean_variance(), m1};
}

OracleComparison compare_discrete_to_limit(const OracleConfig& config) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.reps);
  OracleComparison out;
  out.limit_v1.resize(reps);
  out.limit_m1.resize(reps);
  out.discrete_v1.resize(reps);
  out.discrete_m1.resize(reps);
  const SeedPath root(config.master_seed);
  // A degenerate diffusion (sigma_eta = 0) has no discrete GARCH/SV counterpart.
  const bool with_discrete = config.spec.sigma_eta > 0.0;
  if (!with_discrete) {
    out.discrete_v1.clear();
    out.discrete_m1.clear();
  }
  parallel_for(
      reps, config.threads,
      [&](unsigned, std::size_t r) {
        const LimitFunctionals f = simulate_limit_refined(
            config.spec, config.steps, root.child(Level::Oracle, r));
        out.limit_v1[r] = f.v1;
        out.limit_m1[r] = f.m1;
        if (!with_discrete) return;
        const auto [v1, m1] = discrete_functionals(config, root.child(Level::Discrete, r));
        out.discrete_v1[r] = v1;
        out.discrete_m1[r] = m1;
      },
      8);
  if (with_discrete) {
    out.ks_v1 = ks_two_sample(out.limit_v1, out.discrete_v1);
    out.ks_m1 = ks_two_sample(out.limit_m1, out.discrete_m1);
  } else {
    out.ks_v1 = out.ks_m1 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace volboot
