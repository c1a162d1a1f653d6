#include "volboot/bootstrap.hpp"

#include <string>

namespace volboot {

void BootstrapConfig::validate() const {
  if (B < 1) throw ConfigError("bootstrap: B must be >= 1");
}

nlohmann::json BootstrapRun::to_json(bool include_tau_star) const {
  nlohmann::json j;
  j["stat"] = std::string(to_string(stat));
  j["tail"] = std::string(to_string(tail));
  j["tau_n"] = tau_n;
  j["B"] = B();
  j["p_value"] = p_value;
  if (include_tau_star) {
    j["tau_star"] = std::vector<double>(tau_star.data(), tau_star.data() + tau_star.size());
  }
  return j;
}

namespace {

void residuals_into(Problem problem, const Sample& sample, Eigen::VectorXd& out) {
  if (sample.model != problem) {
    throw ConfigError("residuals_for: sample model '" + std::string(to_string(sample.model)) +
                      "' does not match problem '" + std::string(to_string(problem)) + "'");
  }
  const Eigen::VectorXd& y = sample.y;
  out.resize(y.size());
  switch (problem) {
    case Problem::Location:
      out = y.array() - sample.theta_bar;
      break;
    case Problem::Cusum:
      out = y.array() - y.mean();
      break;
    case Problem::UnitRoot:
      out[0] = y[0];
      out.tail(y.size() - 1) = y.tail(y.size() - 1) - y.head(y.size() - 1);
      break;
  }
}

// y*_t = y*_{t-1} + eps*_t with y*_0 = 0, in place.
void cumulate(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index t = 1; t < v.size(); ++t) v[t] += v[t - 1];
}

double statistic_in_place(StatKind kind, Eigen::Ref<Eigen::VectorXd> eps_star) {
  switch (kind) {
    case StatKind::S: return kernels::location_s(eps_star, 0.0);
    case StatKind::T: return kernels::location_t(eps_star, 0.0, false);
    case StatKind::Tnull: return kernels::location_t(eps_star, 0.0, true);
    case StatKind::CS: return kernels::cusum(eps_star, false);
    case StatKind::CT: return kernels::cusum(eps_star, true);
    case StatKind::R:
      cumulate(eps_star);
      return kernels::dickey_fuller(eps_star, false).coefficient;
    case StatKind::W:
      cumulate(eps_star);
      return kernels::dickey_fuller(eps_star, true).ratio;
  }
  throw ConfigError("unknown statistic");
}

}  // namespace

Eigen::VectorXd residuals_for(Problem problem, const Sample& sample) {
  Eigen::VectorXd out;
  residuals_into(problem, sample, out);
  return out;
}

Eigen::VectorXd wild_resample(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                              const BootstrapConfig& config, int b) {
  config.validate();
  if (residuals.size() < 1) throw ConfigError("wild_resample: empty residuals");
  if (b < 1 || b > config.B) throw ConfigError("wild_resample: b outside [1, B]");
  Eigen::VectorXd w(residuals.size());
  fill_multipliers(config.law, config.replicate_seed(b), w);
  return residuals.cwiseProduct(w);
}

double bootstrap_statistic(StatKind kind, const Eigen::Ref<const Eigen::VectorXd>& eps_star) {
  if (eps_star.size() < 1) throw ConfigError("bootstrap_statistic: empty input");
  Eigen::VectorXd scratch = eps_star;
  return statistic_in_place(kind, scratch);
}

double p_value(double tau_n, const Eigen::Ref<const Eigen::VectorXd>& tau_star, Tail tail) {
  if (tau_star.size() < 1) throw ConfigError("p_value: no bootstrap replicates");
  const Eigen::Index hits = tail == Tail::Left ? (tau_star.array() <= tau_n).count()
                                               : (tau_star.array() >= tau_n).count();
  return static_cast<double>(1 + hits) / static_cast<double>(tau_star.size() + 1);
}

BootstrapRun run_bootstrap(StatKind kind, const Sample& sample, const BootstrapConfig& config) {
  config.validate();
  const StatValue original = compute_statistic(kind, sample);
  Eigen::VectorXd residuals;
  residuals_into(problem_of(kind), sample, residuals);

  BootstrapRun run;
  run.stat = kind;
  run.tail = original.tail;
  run.tau_n = original.value;
  run.tau_star.resize(config.B);
  Eigen::VectorXd w(residuals.size());
  Eigen::VectorXd shocks(residuals.size());
  for (int b = 1; b <= config.B; ++b) {
    fill_multipliers(config.law, config.replicate_seed(b), w);
    shocks = residuals.cwiseProduct(w);
    run.tau_star[b - 1] = statistic_in_place(kind, shocks);
  }
  run.p_value = p_value(run.tau_n, run.tau_star, run.tail);
  return run;
}

double BootstrapWorkspace::p_value(StatKind kind, const Sample& sample,
                                   const BootstrapConfig& config) {
  const StatValue original = compute_statistic(kind, sample);
  residuals_into(problem_of(kind), sample, residuals_);
  multipliers_.resize(residuals_.size());
  shocks_.resize(residuals_.size());
  const bool left = original.tail == Tail::Left;
  int hits = 0;
  for (int b = 1; b <= config.B; ++b) {
    fill_multipliers(config.law, config.replicate_seed(b), multipliers_);
    shocks_ = residuals_.cwiseProduct(multipliers_);
    const double tau_star = statistic_in_place(kind, shocks_);
    hits += left ? (tau_star <= original.value) : (tau_star >= original.value);
  }
  return static_cast<double>(1 + hits) / static_cast<double>(config.B + 1);
}

}  // namespace volboot
