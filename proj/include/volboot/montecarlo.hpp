#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "volboot/bootstrap.hpp"
#include "volboot/distributions.hpp"
#include "volboot/statistics.hpp"
#include "volboot/volatility.hpp"

namespace volboot {

struct Alternative {
  Problem kind = Problem::Location;
  std::vector<double> c_grid;
};

struct ExperimentConfig {
  InnovationLaw dgp = InnovationLaw::Gaussian;
  VolatilitySpec vol = GarchSpec{};
  StatKind stat = StatKind::Tnull;
  Eigen::Index n = 500;
  int n_paths = 100;
  int n_reps = 1000;
  int B = 199;
  MultiplierLaw law = MultiplierLaw::GaussianStd;
  std::optional<Alternative> alternative;
  std::uint64_t master_seed = 42;
  std::vector<double> q_grid = default_q_grid();
  double alpha = 0.05;
  unsigned threads = 1;

  static std::vector<double> default_q_grid();
  Problem problem() const { return problem_of(stat); }
  void validate() const;
  nlohmann::json to_json() const;
};

/// What conditioning on one volatility path fixes about the innovations.
/// For GARCH paths the moduli |z_t|, t <= n-1, are pinned by the path and only
/// the signs remain random; otherwise z is independent of the path.
struct PathConditioning {
  InnovationLaw dgp = InnovationLaw::Gaussian;
  Eigen::Index n = 0;
  bool constrains_moduli = false;
  Eigen::VectorXd moduli;         // length n-1 when constrains_moduli
  Eigen::VectorXd positive_prob;  // P(sign = +1 | modulus), length n-1
};

PathConditioning prepare_conditioning(InnovationLaw dgp, const VolatilityPath& path);

InnovationDraw conditional_innovations(const PathConditioning& cond, const SeedPath& seed);
InnovationDraw conditional_innovations(InnovationLaw dgp, const VolatilityPath& path,
                                       const SeedPath& seed);

/// Volatility path number `path_index` of an experiment (GARCH paths are
/// driven by an unconditional draw of z from the DGP law).
VolatilityPath simulate_path(InnovationLaw dgp, const VolatilitySpec& vol, Eigen::Index n,
                             const SeedPath& path_seed);

/// Null-model samples: location y = eps (theta_bar = 0), CUSUM y = eps,
/// unit root y_t = y_{t-1} + eps_t.
Sample null_sample(Problem problem, const Eigen::Ref<const Eigen::VectorXd>& eps);

/// Local alternatives indexed by c >= 0:
///   location   y_t = -c/sqrt(n) + eps_t, tested against theta_bar = 0
///   CUSUM      y_t = eps_t + c/sqrt(n) 1{t > floor(n/2)}
///   unit root  y_t = (1 - c/n) y_{t-1} + eps_t, y_0 = 0
Sample alternative_sample(Problem problem, const Eigen::Ref<const Eigen::VectorXd>& eps,
                          double c);

struct FanChartTable {
  std::vector<double> q_grid;
  Eigen::MatrixXd per_path_cdf;  // n_paths x |q_grid|
  Eigen::RowVectorXd unconditional_cdf;
  nlohmann::json metadata;

  Eigen::Index n_paths() const { return per_path_cdf.rows(); }
  /// Column index of q in q_grid (exact match), or -1.
  Eigen::Index q_index(double q) const;
};

struct PowerTable {
  std::vector<double> c_grid;
  Eigen::MatrixXd per_path_rejection;  // n_paths x |c_grid|
  Eigen::VectorXd path_mean_variance;  // n^{-1} sum sigma_t^2 per path
  double alpha = 0.05;
  nlohmann::json metadata;

  Eigen::Index n_paths() const { return per_path_rejection.rows(); }
};

/// Raw per-(path, replicate) bootstrap p-values of a size experiment.
Eigen::MatrixXd simulate_null_p_values(const ExperimentConfig& config);

/// Empirical cdf of each row of `p_values` evaluated on `q_grid`.
Eigen::MatrixXd ecdf_rows(const Eigen::MatrixXd& p_values, const std::vector<double>& q_grid);

FanChartTable run_size_experiment(const ExperimentConfig& config);
PowerTable run_power_experiment(const ExperimentConfig& config);

enum class ReferenceCdf { Uniform01, NormalStd, Custom };

/// sup over the grid of |ecdf(q_i) - F(q_i)|. `custom` is used for
/// ReferenceCdf::Custom.
double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& ecdf, const std::vector<double>& grid,
                   ReferenceCdf reference,
                   const std::function<double(double)>& custom = {});

/// Exact sup-distance between an empirical cdf of `sample` and a continuous cdf.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace volboot
