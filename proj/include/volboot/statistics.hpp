#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string_view>

#include "volboot/errors.hpp"
#include "volboot/volatility.hpp"

namespace volboot {

/// Step-function grids of M_n, U_n (and V_n when sigma is known) at u = t/n,
/// t = 0..n. Entry t includes the t-th increment.
struct PartialSumPair {
  Eigen::Index n = 0;
  Eigen::VectorXd m_grid;
  Eigen::VectorXd u_grid;
  std::optional<Eigen::VectorXd> v_grid;
};

PartialSumPair partial_sums(const Eigen::Ref<const Eigen::VectorXd>& eps,
                            const VolatilityPath* sigma = nullptr);

/// sup_t |U_n(t/n) - V_n(t/n)|; requires v_grid.
double sup_quadratic_variation_gap(const PartialSumPair& sums);

enum class Problem { Location, Cusum, UnitRoot };
enum class StatKind { S, T, Tnull, CS, CT, R, W };
enum class Tail { Left, Right };

Problem problem_of(StatKind kind);
Tail tail_of(StatKind kind);
bool is_studentized(StatKind kind);
std::string_view to_string(Problem problem);
std::string_view to_string(StatKind kind);
std::string_view to_string(Tail tail);
StatKind stat_kind_from_string(std::string_view s);
Problem problem_from_string(std::string_view s);

struct Sample {
  Eigen::VectorXd y;
  Problem model = Problem::Location;
  double theta_bar = 0.0;  // hypothesised location (Location only)

  static Sample location(Eigen::VectorXd y, double theta_bar = 0.0);
  static Sample cusum(Eigen::VectorXd y);
  static Sample unit_root(Eigen::VectorXd y);
};

struct StatValue {
  StatKind stat;
  double value;
  Tail tail;
};

// Direct formulas on data vectors. These are the kernels used by both the
// sample statistics and the bootstrap statistics.
namespace kernels {

template <class Derived>
double location_s(const Eigen::MatrixBase<Derived>& y, double theta_bar) {
  const double n = static_cast<double>(y.size());
  return std::sqrt(n) * (y.mean() - theta_bar);
}

/// sqrt(n)(ybar - theta_bar)/s_n. With `null_variance`, s_n^2 is
/// n^{-1} sum (y - theta_bar)^2, otherwise n^{-1} sum (y - ybar)^2.
template <class Derived>
double location_t(const Eigen::MatrixBase<Derived>& y, double theta_bar, bool null_variance) {
  const double n = static_cast<double>(y.size());
  const double mean = y.mean();
  const double centre = null_variance ? theta_bar : mean;
  const double s2 = (y.array() - centre).square().sum() / n;
  if (!(s2 > 0.0)) throw NumericalError("location statistic: s_n = 0");
  return std::sqrt(n) * (mean - theta_bar) / std::sqrt(s2);
}

/// n^{-1/2} max_{t=1..n} |sum_{i<=t}(y_i - ybar)|, optionally divided by s_n.
template <class Derived>
double cusum(const Eigen::MatrixBase<Derived>& y, bool studentize) {
  const Eigen::Index n = y.size();
  const double nd = static_cast<double>(n);
  const double mean = y.mean();
  double running = 0.0;
  double best = 0.0;
  double ss = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double d = y[t] - mean;
    running += d;
    ss += d * d;
    best = std::max(best, std::abs(running));
  }
  double out = best / std::sqrt(nd);
  if (studentize) {
    const double s2 = ss / nd;
    if (!(s2 > 0.0)) throw NumericalError("CUSUM statistic: s_n = 0");
    out /= std::sqrt(s2);
  }
  return out;
}

struct DickeyFuller {
  double theta_hat;
  double coefficient;  // R_n = n theta_hat
  double ratio;        // W_n
};

/// Regression of dy_t on y_{t-1}, y_0 = 0.
template <class Derived>
DickeyFuller dickey_fuller(const Eigen::MatrixBase<Derived>& y, bool need_ratio) {
  const Eigen::Index n = y.size();
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double lag = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double dy = y[t] - lag;
    sxy += lag * dy;
    sxx += lag * lag;
    syy += dy * dy;
    lag = y[t];
  }
  if (!(sxx > 0.0)) {
    throw NumericalError("unit-root statistic: sum of squared lagged levels is zero");
  }
  DickeyFuller out{};
  out.theta_hat = sxy / sxx;
  out.coefficient = static_cast<double>(n) * out.theta_hat;
  out.ratio = 0.0;
  if (need_ratio) {
    // Residual sum of squares of the no-intercept regression.
    const double rss = std::max(syy - out.theta_hat * sxy, 0.0);
    const double s2 = rss / static_cast<double>(n);
    if (!(s2 > 0.0)) throw NumericalError("unit-root ratio statistic: s_n = 0");
    out.ratio = out.theta_hat * std::sqrt(sxx) / std::sqrt(s2);
  }
  return out;
}

}  // namespace kernels

// (M_n, U_n)-functional representations under the null parametrization.
namespace functional {

double location_s(const PartialSumPair& p);
double location_t(const PartialSumPair& p);
double location_tnull(const PartialSumPair& p);
double cusum_cs(const PartialSumPair& p);
double cusum_ct(const PartialSumPair& p);
// int_0^1 M_n(u)^2 du = n^{-1} sum_{t=0}^{n-1} M_n(t/n)^2
double integrated_square(const PartialSumPair& p);
double unitroot_r(const PartialSumPair& p);
double unitroot_w(const PartialSumPair& p);

}  // namespace functional

StatValue stat_location(const Sample& sample, bool studentize, bool null_variance);
StatValue stat_cusum(const Sample& sample, bool studentize);
StatValue stat_unitroot(const Sample& sample, bool studentize);

/// Dispatch on `kind`; the sample model must match problem_of(kind).
StatValue compute_statistic(StatKind kind, const Sample& sample);

}  // namespace volboot
