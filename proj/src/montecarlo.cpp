#include "volboot/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "volboot/parallel.hpp"

namespace volboot {

std::vector<double> ExperimentConfig::default_q_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(static_cast<double>(k) / 100.0);
  return grid;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("experiment: n must be >= 2");
  if (n_paths < 1) throw ConfigError("experiment: n_paths must be >= 1");
  if (n_reps < 1) throw ConfigError("experiment: n_reps must be >= 1");
  if (B < 1) throw ConfigError("experiment: B must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("experiment: alpha must be in (0,1)");
  if (q_grid.empty()) throw ConfigError("experiment: empty q grid");
  if (!std::is_sorted(q_grid.begin(), q_grid.end())) {
    throw ConfigError("experiment: q grid must be sorted");
  }
  std::visit([](const auto& s) { s.validate(); }, vol);
  if (const auto* g = std::get_if<GarchSpec>(&vol)) GarchCoefficients::at(*g, n);
  if (alternative) {
    if (alternative->kind != problem()) {
      throw ConfigError("experiment: alternative kind does not match the statistic's problem");
    }
    if (alternative->c_grid.empty()) throw ConfigError("experiment: empty c grid");
    if (!std::is_sorted(alternative->c_grid.begin(), alternative->c_grid.end())) {
      throw ConfigError("experiment: c grid must be sorted");
    }
    if (alternative->c_grid.front() < 0.0) {
      throw ConfigError("experiment: c grid must be nonnegative");
    }
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["dgp"] = std::string(to_string(dgp));
  j["stat"] = std::string(to_string(stat));
  j["problem"] = std::string(to_string(problem()));
  j["tail"] = std::string(to_string(tail_of(stat)));
  j["n"] = n;
  j["paths"] = n_paths;
  j["reps"] = n_reps;
  j["B"] = B;
  j["multiplier_law"] = std::string(to_string(law));
  j["seed"] = master_seed;
  j["alpha"] = alpha;
  j["threads"] = threads;
  j["q_grid"] = q_grid;
  nlohmann::json v;
  std::visit(
      [&v](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SvSpec>) {
          v = {{"kind", "sv"}, {"kappa", s.kappa}, {"sigma_bar", s.sigma_bar},
               {"sigma_eta", s.sigma_eta}, {"initial_log_var", s.initial_log_variance()}};
        } else if constexpr (std::is_same_v<T, GarchSpec>) {
          v = {{"kind", "garch"}, {"kappa", s.kappa}, {"sigma_bar", s.sigma_bar},
               {"sigma_eta", s.sigma_eta}, {"initial_var", s.initial_variance()}};
        } else {
          v = {{"kind", "jump"}, {"omega0", s.omega0}, {"omega1", s.omega1},
               {"lambda", s.lambda}, {"jump_law", std::string(to_string(s.jump_law))}};
        }
      },
      vol);
  j["volatility"] = v;
  if (alternative) {
    j["alternative"] = {{"kind", std::string(to_string(alternative->kind))},
                        {"c_grid", alternative->c_grid}};
  }
  return j;
}

PathConditioning prepare_conditioning(InnovationLaw dgp, const VolatilityPath& path) {
  PathConditioning cond;
  cond.dgp = dgp;
  cond.n = path.n();
  const auto* garch = std::get_if<GarchSpec>(&path.spec);
  if (!path.needs_z || garch == nullptr) return cond;
  cond.constrains_moduli = true;
  cond.moduli = garch_inverted_moduli(*garch, path);
  const MixtureSpec& spec = mixture_for(dgp);
  cond.positive_prob = cond.moduli.unaryExpr([&](double m) {
    // A zero modulus carries no sign information.
    return dgp == InnovationLaw::Gaussian || m == 0.0 ? 0.5
                                                      : positive_sign_probability(spec, m);
  });
  return cond;
}

InnovationDraw conditional_innovations(const PathConditioning& cond, const SeedPath& seed) {
  if (!cond.constrains_moduli) {
    return draw_innovations(cond.dgp, cond.n, seed.child(Level::Innovation, 0));
  }
  Eigen::VectorXd z(cond.n);
  Xoshiro256pp sign_engine(seed.child(Level::Sign, 0));
  for (Eigen::Index t = 0; t + 1 < cond.n; ++t) {
    const double s = sign_engine.uniform01() < cond.positive_prob[t] ? 1.0 : -1.0;
    z[t] = s * cond.moduli[t];
  }
  // z_n is not pinned by the path.
  const InnovationDraw last = draw_innovations(cond.dgp, 1, seed.child(Level::Innovation, 0));
  z[cond.n - 1] = last.z[0];
  return InnovationDraw::from_values(std::move(z));
}

InnovationDraw conditional_innovations(InnovationLaw dgp, const VolatilityPath& path,
                                       const SeedPath& seed) {
  return conditional_innovations(prepare_conditioning(dgp, path), seed);
}

VolatilityPath simulate_path(InnovationLaw dgp, const VolatilitySpec& vol, Eigen::Index n,
                             const SeedPath& path_seed) {
  return std::visit(
      [&](const auto& spec) -> VolatilityPath {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, GarchSpec>) {
          const InnovationDraw z = draw_innovations(dgp, n, path_seed.child(Level::Innovation, 0));
          return gen_garch_path(spec, n, z);
        } else if constexpr (std::is_same_v<T, SvSpec>) {
          return gen_sv_path(spec, n, path_seed.child(Level::Volatility, 0));
        } else {
          return gen_jump_path(spec, n, path_seed.child(Level::Volatility, 0));
        }
      },
      vol);
}

Sample null_sample(Problem problem, const Eigen::Ref<const Eigen::VectorXd>& eps) {
  return alternative_sample(problem, eps, 0.0);
}

Sample alternative_sample(Problem problem, const Eigen::Ref<const Eigen::VectorXd>& eps,
                          double c) {
  const Eigen::Index n = eps.size();
  const double nd = static_cast<double>(n);
  switch (problem) {
    case Problem::Location:
      return Sample::location(eps.array() - c / std::sqrt(nd), 0.0);
    case Problem::Cusum: {
      Eigen::VectorXd y = eps;
      y.tail(n - n / 2).array() += c / std::sqrt(nd);
      return Sample::cusum(std::move(y));
    }
    case Problem::UnitRoot: {
      const double rho = 1.0 - c / nd;
      Eigen::VectorXd y(n);
      double prev = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) {
        prev = rho * prev + eps[t];
        y[t] = prev;
      }
      return Sample::unit_root(std::move(y));
    }
  }
  throw ConfigError("unknown problem");
}

Eigen::Index FanChartTable::q_index(double q) const {
  for (std::size_t k = 0; k < q_grid.size(); ++k) {
    if (q_grid[k] == q) return static_cast<Eigen::Index>(k);
  }
  return -1;
}

namespace {

SeedPath path_seed(const ExperimentConfig& config, int p) {
  return SeedPath(config.master_seed).child(Level::Path, static_cast<std::uint64_t>(p));
}

SeedPath replicate_seed(const SeedPath& path, int r) {
  return path.child(Level::Replicate, static_cast<std::uint64_t>(r));
}

BootstrapConfig bootstrap_config(const ExperimentConfig& config, const SeedPath& replicate) {
  return {config.B, config.law, replicate.child(Level::Multiplier, 0)};
}

struct PreparedPath {
  VolatilityPath path;
  PathConditioning conditioning;
};

std::vector<PreparedPath> prepare_paths(const ExperimentConfig& config) {
  std::vector<PreparedPath> paths(static_cast<std::size_t>(config.n_paths));
  parallel_for(paths.size(), config.threads, [&](unsigned, std::size_t p) {
    VolatilityPath path =
        simulate_path(config.dgp, config.vol, config.n, path_seed(config, static_cast<int>(p)));
    PathConditioning cond = prepare_conditioning(config.dgp, path);
    paths[p] = {std::move(path), std::move(cond)};
  });
  return paths;
}

nlohmann::json metadata_for(const ExperimentConfig& config) {
  nlohmann::json meta = config.to_json();
  meta.erase("threads");  // results do not depend on it
  meta["seed_lineage"] = "master/path:p/replicate:r/{sign,innovation,multiplier/bootstrap:b}";
  return meta;
}

}  // namespace

Eigen::MatrixXd simulate_null_p_values(const ExperimentConfig& config) {
  config.validate();
  const std::vector<PreparedPath> paths = prepare_paths(config);
  const std::size_t reps = static_cast<std::size_t>(config.n_reps);
  Eigen::MatrixXd p_values(config.n_paths, config.n_reps);
  std::vector<BootstrapWorkspace> workspaces(std::max(1U, config.threads));
  const Problem problem = config.problem();

  parallel_for(
      paths.size() * reps, config.threads,
      [&](unsigned worker, std::size_t item) {
        const int p = static_cast<int>(item / reps);
        const int r = static_cast<int>(item % reps);
        const PreparedPath& prepared = paths[static_cast<std::size_t>(p)];
        const SeedPath rep = replicate_seed(path_seed(config, p), r);
        const InnovationDraw z = conditional_innovations(prepared.conditioning, rep);
        const Eigen::VectorXd eps = prepared.path.sigmas.cwiseProduct(z.z);
        const Sample sample = null_sample(problem, eps);
        p_values(p, r) = workspaces[worker].p_value(config.stat, sample, bootstrap_config(config, rep));
      },
      16);
  return p_values;
}

Eigen::MatrixXd ecdf_rows(const Eigen::MatrixXd& p_values, const std::vector<double>& q_grid) {
  Eigen::MatrixXd out(p_values.rows(), static_cast<Eigen::Index>(q_grid.size()));
  for (Eigen::Index i = 0; i < p_values.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(p_values.cols()));
    for (Eigen::Index j = 0; j < p_values.cols(); ++j) row[static_cast<std::size_t>(j)] = p_values(i, j);
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < q_grid.size(); ++k) {
      const auto below = std::upper_bound(row.begin(), row.end(), q_grid[k]) - row.begin();
      out(i, static_cast<Eigen::Index>(k)) =
          static_cast<double>(below) / static_cast<double>(row.size());
    }
  }
  return out;
}

FanChartTable run_size_experiment(const ExperimentConfig& config) {
  if (config.alternative) {
    throw ConfigError("run_size_experiment: alternative must be absent");
  }
  const Eigen::MatrixXd p_values = simulate_null_p_values(config);
  FanChartTable table;
  table.q_grid = config.q_grid;
  table.per_path_cdf = ecdf_rows(p_values, config.q_grid);
  table.unconditional_cdf = table.per_path_cdf.colwise().mean();
  table.metadata = metadata_for(config);
  return table;
}

PowerTable run_power_experiment(const ExperimentConfig& config) {
  if (!config.alternative) throw ConfigError("run_power_experiment: alternative required");
  config.validate();
  const std::vector<PreparedPath> paths = prepare_paths(config);
  const std::vector<double>& c_grid = config.alternative->c_grid;
  const std::size_t reps = static_cast<std::size_t>(config.n_reps);
  const std::size_t nc = c_grid.size();
  const Problem problem = config.problem();

  // rejections[item * nc + k]; summed per path afterwards.
  std::vector<std::uint8_t> rejections(paths.size() * reps * nc, 0);
  std::vector<BootstrapWorkspace> workspaces(std::max(1U, config.threads));
  parallel_for(
      paths.size() * reps, config.threads,
      [&](unsigned worker, std::size_t item) {
        const int p = static_cast<int>(item / reps);
        const int r = static_cast<int>(item % reps);
        const PreparedPath& prepared = paths[static_cast<std::size_t>(p)];
        const SeedPath rep = replicate_seed(path_seed(config, p), r);
        const InnovationDraw z = conditional_innovations(prepared.conditioning, rep);
        const Eigen::VectorXd eps = prepared.path.sigmas.cwiseProduct(z.z);
        const BootstrapConfig boot = bootstrap_config(config, rep);
        // The same innovations and multipliers are reused across c.
        for (std::size_t k = 0; k < nc; ++k) {
          const Sample sample = alternative_sample(problem, eps, c_grid[k]);
          const double p_star = workspaces[worker].p_value(config.stat, sample, boot);
          rejections[item * nc + k] = p_star <= config.alpha ? 1 : 0;
        }
      },
      16);

  PowerTable table;
  table.c_grid = c_grid;
  table.alpha = config.alpha;
  table.per_path_rejection.setZero(config.n_paths, static_cast<Eigen::Index>(nc));
  table.path_mean_variance.resize(config.n_paths);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    table.path_mean_variance[static_cast<Eigen::Index>(p)] = paths[p].path.mean_variance();
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t k = 0; k < nc; ++k) {
        table.per_path_rejection(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) +=
            rejections[(p * reps + r) * nc + k];
      }
    }
  }
  table.per_path_rejection /= static_cast<double>(reps);
  table.metadata = metadata_for(config);
  return table;
}

double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& ecdf, const std::vector<double>& grid,
                   ReferenceCdf reference, const std::function<double(double)>& custom) {
  if (static_cast<std::size_t>(ecdf.size()) != grid.size()) {
    throw ConfigError("ks_distance: ecdf and grid lengths differ");
  }
  const boost::math::normal_distribution<double> std_normal;
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double q = grid[k];
    double f = 0.0;
    switch (reference) {
      case ReferenceCdf::Uniform01: f = std::clamp(q, 0.0, 1.0); break;
      case ReferenceCdf::NormalStd: f = boost::math::cdf(std_normal, q); break;
      case ReferenceCdf::Custom:
        if (!custom) throw ConfigError("ks_distance: custom reference cdf missing");
        f = custom(q);
        break;
    }
    worst = std::max(worst, std::abs(ecdf[static_cast<Eigen::Index>(k)] - f));
  }
  return worst;
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ConfigError("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

}  // namespace volboot
