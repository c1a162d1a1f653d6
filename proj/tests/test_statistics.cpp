#include <gtest/gtest.h>

#include <algorithm>

#include "volboot/errors.hpp"
#include "volboot/statistics.hpp"

using namespace volboot;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Eigen::VectorXd random_eps(Eigen::Index n, std::uint64_t seed) {
  return draw_innovations(InnovationLaw::Dgp3, n, SeedPath(seed)).z;
}

Eigen::VectorXd cumulate(const Eigen::VectorXd& eps) {
  Eigen::VectorXd y(eps.size());
  double acc = 0.0;
  for (Eigen::Index t = 0; t < eps.size(); ++t) y[t] = acc += eps[t];
  return y;
}

void expect_rel(double a, double b, double tol) {
  EXPECT_LE(std::abs(a - b), tol * std::max(1.0, std::abs(b))) << a << " vs " << b;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(PartialSums, HandExample) {
  const auto p = partial_sums(vec({1.0, -1.0, 2.0}));
  const double r3 = std::sqrt(3.0);
  ASSERT_EQ(p.m_grid.size(), 4);
  EXPECT_NEAR(p.m_grid[0], 0.0, 1e-15);
  EXPECT_NEAR(p.m_grid[1], 1.0 / r3, 1e-15);
  EXPECT_NEAR(p.m_grid[2], 0.0, 1e-15);
  EXPECT_NEAR(p.m_grid[3], 2.0 / r3, 1e-15);
  EXPECT_NEAR(p.u_grid[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.u_grid[2], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.u_grid[3], 2.0, 1e-15);
  EXPECT_FALSE(p.v_grid.has_value());
}

TEST(PartialSums, ZeroInput) {
  const auto p = partial_sums(Eigen::VectorXd::Zero(7));
  EXPECT_TRUE(p.m_grid.isZero(0.0));
  EXPECT_TRUE(p.u_grid.isZero(0.0));
}

TEST(PartialSums, QuadraticVariationIdentity) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto p = partial_sums(random_eps(300, s));
    for (Eigen::Index t = 1; t <= p.n; ++t) {
      const double dm = p.m_grid[t] - p.m_grid[t - 1];
      EXPECT_NEAR(p.u_grid[t] - p.u_grid[t - 1], dm * dm, 1e-12);
    }
  }
}

TEST(PartialSums, PredictableVariation) {
  const auto path = gen_sv_path(SvSpec{}, 100, SeedPath(3));
  const auto p = partial_sums(random_eps(100, 4), &path);
  ASSERT_TRUE(p.v_grid.has_value());
  EXPECT_NEAR((*p.v_grid)[100], path.mean_variance(), 1e-12);
  for (Eigen::Index t = 1; t <= 100; ++t) EXPECT_GE((*p.v_grid)[t], (*p.v_grid)[t - 1]);
  EXPECT_THROW(sup_quadratic_variation_gap(partial_sums(random_eps(5, 1))), ConfigError);
}

TEST(Location, HandExample) {
  const auto sample = Sample::location(vec({1.0, -1.0, 2.0}), 0.0);
  EXPECT_NEAR(stat_location(sample, false, false).value, 1.1547, 1e-4);
  EXPECT_NEAR(stat_location(sample, true, true).value, 0.8165, 1e-4);
  EXPECT_DOUBLE_EQ(stat_location(sample, false, false).value, 2.0 / std::sqrt(3.0));
  EXPECT_NEAR(stat_location(sample, true, true).value, 2.0 / std::sqrt(3.0) / std::sqrt(2.0), 1e-15);
  // s_n^2 = mean((y - 2/3)^2) = 14/9
  EXPECT_NEAR(stat_location(sample, true, false).value,
              std::sqrt(3.0) * (2.0 / 3.0) / std::sqrt(14.0 / 9.0), 1e-14);
}

TEST(Location, ExactNullFitAndDegenerateScale) {
  const auto sample = Sample::location(Eigen::VectorXd::Constant(10, 3.5), 3.5);
  EXPECT_EQ(stat_location(sample, false, false).value, 0.0);
  EXPECT_THROW(stat_location(sample, true, true), NumericalError);
}

TEST(Location, EquivarianceUnderCommonShift) {
  const Eigen::VectorXd y = random_eps(200, 8);
  for (auto kind : {StatKind::S, StatKind::T, StatKind::Tnull}) {
    const double base = compute_statistic(kind, Sample::location(y, 0.1)).value;
    const Eigen::VectorXd shifted = (y.array() + 4.0).matrix();
    expect_rel(compute_statistic(kind, Sample::location(shifted, 4.1)).value, base, 1e-12);
  }
}

TEST(Cusum, HandExample) {
  const auto sample = Sample::cusum(vec({1.0, -1.0}));
  EXPECT_NEAR(stat_cusum(sample, false).value, 0.7071, 1e-4);
  EXPECT_EQ(stat_cusum(sample, false).tail, Tail::Right);
}

TEST(Cusum, ConstantAndShift) {
  EXPECT_EQ(stat_cusum(Sample::cusum(Eigen::VectorXd::Constant(9, 2.0)), false).value, 0.0);
  const Eigen::VectorXd y = random_eps(150, 9);
  const Eigen::VectorXd shifted = (y.array() - 7.0).matrix();
  expect_rel(stat_cusum(Sample::cusum(shifted), false).value, stat_cusum(Sample::cusum(y), false).value,
             1e-12);
}

TEST(UnitRoot, HandExample) {
  const auto sample = Sample::unit_root(vec({1.0, 2.0, 3.0}));
  EXPECT_NEAR(stat_unitroot(sample, false).value, 1.8, 1e-14);
}

TEST(UnitRoot, ExactUnitRootAfterFirstStep) {
  const auto sample = Sample::unit_root(Eigen::VectorXd::Constant(20, 1.3));
  EXPECT_NEAR(stat_unitroot(sample, false).value, 0.0, 1e-15);
}

TEST(UnitRoot, ZeroRegressorRejected) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
  y[3] = 1.0;
  EXPECT_NO_THROW(stat_unitroot(Sample::unit_root(y), false));
  EXPECT_THROW(stat_unitroot(Sample::unit_root(Eigen::VectorXd::Zero(5)), false), NumericalError);
}

TEST(UnitRoot, NumeratorIdentity) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Eigen::VectorXd eps = random_eps(400, 100 + s);
    const Eigen::VectorXd y = cumulate(eps);
    double lhs = 0.0;
    double lag = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
      lhs += lag * (y[t] - lag);
      lag = y[t];
    }
    const double rhs = 0.5 * (y[y.size() - 1] * y[y.size() - 1] - eps.squaredNorm());
    expect_rel(lhs, rhs, 1e-10);
  }
}

TEST(Functional, MatchesDirectFormulas) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(s) * 7;
    const Eigen::VectorXd eps = random_eps(n, 500 + s);
    const auto p = partial_sums(eps);
    const auto loc = Sample::location(eps, 0.0);
    const auto cus = Sample::cusum(eps);
    const auto ur = Sample::unit_root(cumulate(eps));
    expect_rel(functional::location_s(p), compute_statistic(StatKind::S, loc).value, 1e-10);
    expect_rel(functional::location_t(p), compute_statistic(StatKind::T, loc).value, 1e-10);
    expect_rel(functional::location_tnull(p), compute_statistic(StatKind::Tnull, loc).value, 1e-10);
    expect_rel(functional::cusum_cs(p), compute_statistic(StatKind::CS, cus).value, 1e-10);
    expect_rel(functional::cusum_ct(p), compute_statistic(StatKind::CT, cus).value, 1e-10);
    expect_rel(functional::unitroot_r(p), compute_statistic(StatKind::R, ur).value, 1e-10);
    expect_rel(functional::unitroot_w(p), compute_statistic(StatKind::W, ur).value, 1e-10);
  }
}

TEST(Statistics, ScaleEquivariance) {
  const double c = 3.7;
  const Eigen::VectorXd eps = random_eps(250, 77);
  const Eigen::VectorXd scaled = c * eps;
  auto value = [](StatKind kind, const Eigen::VectorXd& e) {
    switch (problem_of(kind)) {
      case Problem::Location: return compute_statistic(kind, Sample::location(e)).value;
      case Problem::Cusum: return compute_statistic(kind, Sample::cusum(e)).value;
      case Problem::UnitRoot: return compute_statistic(kind, Sample::unit_root(cumulate(e))).value;
    }
    return 0.0;
  };
  expect_rel(value(StatKind::S, scaled), c * value(StatKind::S, eps), 1e-12);
  expect_rel(value(StatKind::CS, scaled), c * value(StatKind::CS, eps), 1e-12);
  for (auto kind : {StatKind::T, StatKind::Tnull, StatKind::CT, StatKind::R, StatKind::W}) {
    expect_rel(value(kind, scaled), value(kind, eps), 1e-12);
  }
}

TEST(Statistics, TailsAndNames) {
  for (auto kind : {StatKind::S, StatKind::T, StatKind::Tnull, StatKind::R, StatKind::W}) {
    EXPECT_EQ(tail_of(kind), Tail::Left);
  }
  EXPECT_EQ(tail_of(StatKind::CS), Tail::Right);
  EXPECT_EQ(tail_of(StatKind::CT), Tail::Right);
  for (auto kind : {StatKind::S, StatKind::T, StatKind::Tnull, StatKind::CS, StatKind::CT,
                    StatKind::R, StatKind::W}) {
    EXPECT_EQ(stat_kind_from_string(to_string(kind)), kind);
  }
}

TEST(Statistics, ModelMismatchAndShortSamples) {
  EXPECT_THROW(compute_statistic(StatKind::R, Sample::location(random_eps(10, 1))), ConfigError);
  EXPECT_THROW(Sample::cusum(vec({1.0})), ConfigError);
}

TEST(VariationGap, ShrinksWithSampleSize) {
  auto median_gap = [](Eigen::Index n) {
    std::vector<double> gaps;
    for (int r = 0; r < 200; ++r) {
      const SeedPath seed = SeedPath(31).child(Level::Path, static_cast<std::uint64_t>(r));
      const auto path = gen_sv_path(SvSpec{}, n, seed.child(Level::Volatility, 0));
      const auto z = draw_innovations(InnovationLaw::Gaussian, n, seed.child(Level::Innovation, 0));
      const Eigen::VectorXd eps = path.sigmas.cwiseProduct(z.z);
      gaps.push_back(sup_quadratic_variation_gap(partial_sums(eps, &path)));
    }
    return median(gaps);
  };
  EXPECT_LT(median_gap(10000), median_gap(100));
}
