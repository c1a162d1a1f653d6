#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "volboot/distributions.hpp"
#include "volboot/errors.hpp"
#include "volboot/montecarlo.hpp"

using namespace volboot;

namespace {

double normal_density(double z, double mu, double s) {
  const double u = (z - mu) / s;
  return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
}

// Raw moments E[z^k], k = 1..3, by trapezoid over +-12 sd of the widest component.
std::array<double, 3> integrated_moments(const MixtureSpec& spec) {
  const double width = 12.0 * std::max(spec.sds[0], spec.sds[1]);
  const int steps = 400000;
  const double h = 2.0 * width / steps;
  std::array<double, 3> m{};
  for (int i = 0; i <= steps; ++i) {
    const double z = -width + i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    const double f = w * h * mixture_pdf(spec, z);
    m[0] += f * z;
    m[1] += f * z * z;
    m[2] += f * z * z * z;
  }
  return m;
}

struct Moments {
  double mean, var, m3, se_mean, se_var, se_m3;
};

Moments sample_moments(const Eigen::VectorXd& z) {
  const double n = static_cast<double>(z.size());
  const double mean = z.mean();
  const Eigen::ArrayXd d = z.array() - mean;
  const double m2 = d.square().mean();
  const double m3 = d.cube().mean();
  const double m4 = d.pow(4).mean();
  const double m6 = d.pow(6).mean();
  return {mean, m2, m3, std::sqrt(m2 / n), std::sqrt((m4 - m2 * m2) / n),
          std::sqrt((m6 - m3 * m3) / n)};
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST(Mixture, PresetClosedFormMoments) {
  const auto dgp2 = MixtureSpec::dgp2();
  EXPECT_NEAR(dgp2.mean(), 0.0, 1e-12);
  EXPECT_NEAR(dgp2.variance(), 1.0, 1e-12);
  EXPECT_NEAR(dgp2.third_central_moment(), 0.0, 1e-12);

  const auto dgp3 = MixtureSpec::dgp3();
  EXPECT_NEAR(dgp3.mean(), 0.0, 1e-12);
  EXPECT_NEAR(dgp3.variance(), 1.0, 1e-12);
  EXPECT_LT(dgp3.third_central_moment(), 0.0);
}

TEST(Mixture, IntegratedMomentsMatchClosedForm) {
  for (const auto& spec : {MixtureSpec::standard_normal(), MixtureSpec::dgp2(), MixtureSpec::dgp3()}) {
    const auto m = integrated_moments(spec);
    const double mean = spec.mean();
    const double var = m[1] - m[0] * m[0];
    const double third = m[2] - 3.0 * m[0] * m[1] + 2.0 * m[0] * m[0] * m[0];
    EXPECT_NEAR(m[0], mean, 1e-8);
    EXPECT_NEAR(var, spec.variance(), 1e-8);
    EXPECT_NEAR(third, spec.third_central_moment(), 1e-8);
  }
}

TEST(Mixture, DegenerateSecondComponentPdf) {
  MixtureSpec spec;
  spec.weights = {1.0, 0.0};
  EXPECT_NEAR(mixture_pdf(spec, 0.0), 0.39894, 1e-5);
  EXPECT_DOUBLE_EQ(mixture_pdf(spec, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi));
}

TEST(Mixture, ValidateRejectsBadSpecs) {
  MixtureSpec spec;
  spec.weights = {0.7, 0.4};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.weights = {1.0, 0.0};
  spec.sds = {1.0, 0.0};
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Innovations, GaussianSampleMoments) {
  const auto draw = draw_innovations(InnovationLaw::Gaussian, 100000, SeedPath(11));
  const double mean = draw.z.mean();
  const double var = (draw.z.array() - mean).square().sum() / (draw.size() - 1);
  EXPECT_GT(mean, -0.02);
  EXPECT_LT(mean, 0.02);
  EXPECT_GT(var, 0.98);
  EXPECT_LT(var, 1.02);
}

TEST(Innovations, Dgp3SkewnessNegative) {
  const auto draw = draw_innovations(InnovationLaw::Dgp3, 1000000, SeedPath(12));
  const auto m = sample_moments(draw.z);
  EXPECT_LT(m.m3, 0.0);
}

TEST(Innovations, DeterministicAndDecomposed) {
  const auto seed = SeedPath(3).child(Level::Innovation, 9);
  const auto a = draw_innovations(InnovationLaw::Dgp2, 1000, seed);
  const auto b = draw_innovations(InnovationLaw::Dgp2, 1000, seed);
  EXPECT_TRUE(a.z == b.z);
  EXPECT_TRUE((a.sign.array() * a.modulus.array()).matrix() == a.z);
  EXPECT_TRUE((a.sign.array().abs() == 1.0).all());
}

TEST(Innovations, RejectsEmpty) {
  EXPECT_THROW(draw_innovations(InnovationLaw::Gaussian, 0, SeedPath(1)), ConfigError);
}

TEST(Innovations, SiblingStreamsUncorrelated) {
  const SeedPath root(2024);
  const auto a = draw_innovations(InnovationLaw::Gaussian, 100000, root.child(Level::Path, 0));
  const auto b = draw_innovations(InnovationLaw::Gaussian, 100000, root.child(Level::Path, 1));
  const Eigen::ArrayXd da = a.z.array() - a.z.mean();
  const Eigen::ArrayXd db = b.z.array() - b.z.mean();
  const double rho = (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
  EXPECT_LT(std::abs(rho), 0.01);
}

TEST(SignRedraw, GaussianIsFairCoin) {
  for (double psi : {0.01, 0.5, 1.0, 3.0, 8.0}) {
    EXPECT_DOUBLE_EQ(positive_sign_probability(MixtureSpec::standard_normal(), psi), 0.5);
  }
}

TEST(SignRedraw, Dgp2ProbabilityFromDensities) {
  const double a = std::sqrt(3.0 / 11.0);
  auto f = [&](double z) {
    return normal_density(z, -2.0 * a, a) / 3.0 + 2.0 * normal_density(z, a, a * std::sqrt(2.0)) / 3.0;
  };
  const double expected = f(1.0) / (f(1.0) + f(-1.0));
  EXPECT_NEAR(positive_sign_probability(MixtureSpec::dgp2(), 1.0), expected, 1e-14);
}

TEST(SignRedraw, FarTailUsesLogDomain) {
  const double p = positive_sign_probability(MixtureSpec::dgp3(), 60.0);
  EXPECT_TRUE(std::isfinite(p));
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
}

TEST(SignRedraw, RejectsZeroModulus) {
  Eigen::VectorXd moduli(3);
  moduli << 1.0, 0.0, 2.0;
  EXPECT_THROW(conditional_sign_redraw(moduli, InnovationLaw::Dgp2, SeedPath(1)), ConfigError);
}

TEST(SignRedraw, Dgp2MomentMatching) {
  const int n = 1000000;
  const auto direct = draw_innovations(InnovationLaw::Dgp2, n, SeedPath(31));
  const auto signs = conditional_sign_redraw(direct.modulus, InnovationLaw::Dgp2, SeedPath(32));
  const Eigen::VectorXd rebuilt = signs.cwiseProduct(direct.modulus);
  const auto m = sample_moments(rebuilt);
  EXPECT_LT(std::abs(m.mean - 0.0), 4.0 * m.se_mean);
  EXPECT_LT(std::abs(m.var - 1.0), 4.0 * m.se_var);
  EXPECT_LT(std::abs(m.m3 - 0.0), 4.0 * m.se_m3);
}

TEST(SignRedraw, DistributionPreserving) {
  const int n = 1000000;
  for (auto law : {InnovationLaw::Gaussian, InnovationLaw::Dgp2, InnovationLaw::Dgp3}) {
    const SeedPath root(77);
    const auto source = draw_innovations(law, n, root.child(Level::Innovation, 0));
    const auto signs = conditional_sign_redraw(source.modulus, law, root.child(Level::Sign, 0));
    const Eigen::VectorXd rebuilt = signs.cwiseProduct(source.modulus);
    const auto direct = draw_innovations(law, n, root.child(Level::Innovation, 1));
    EXPECT_LT(ks_two_sample(as_vector(rebuilt), as_vector(direct.z)), 0.003) << to_string(law);
  }
}

TEST(Multipliers, RademacherSupport) {
  const auto w = draw_multipliers(MultiplierLaw::Rademacher, 10000, SeedPath(4));
  EXPECT_TRUE((w.array().abs() == 1.0).all());
  EXPECT_NEAR(w.mean(), 0.0, 4.0 / std::sqrt(10000.0));
}

TEST(Multipliers, GaussianVariance) {
  const auto w = draw_multipliers(MultiplierLaw::GaussianStd, 100000, SeedPath(5));
  const double var = (w.array() - w.mean()).square().sum() / (w.size() - 1);
  EXPECT_GT(var, 0.98);
  EXPECT_LT(var, 1.02);
}

TEST(Multipliers, MammenTwoPointLaw) {
  const double lo = -(std::sqrt(5.0) - 1.0) / 2.0;
  const double hi = (std::sqrt(5.0) + 1.0) / 2.0;
  const double p_hi = (std::sqrt(5.0) - 1.0) / (2.0 * std::sqrt(5.0));
  EXPECT_NEAR(p_hi * hi + (1 - p_hi) * lo, 0.0, 1e-15);
  EXPECT_NEAR(p_hi * hi * hi + (1 - p_hi) * lo * lo, 1.0, 1e-15);

  const int n = 100000;
  const auto w = draw_multipliers(MultiplierLaw::MammenTwoPoint, n, SeedPath(6));
  int high = 0;
  for (double x : w) {
    ASSERT_TRUE(x == lo || x == hi);
    high += x == hi;
  }
  EXPECT_NEAR(static_cast<double>(high) / n, p_hi, 4.0 * std::sqrt(p_hi * (1 - p_hi) / n));
  EXPECT_NEAR(w.mean(), 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Multipliers, RejectsEmpty) {
  EXPECT_THROW(draw_multipliers(MultiplierLaw::Rademacher, 0, SeedPath(1)), ConfigError);
}

TEST(Multipliers, LawNamesRoundTrip) {
  for (auto law : {MultiplierLaw::GaussianStd, MultiplierLaw::Rademacher, MultiplierLaw::MammenTwoPoint}) {
    EXPECT_EQ(multiplier_law_from_string(to_string(law)), law);
  }
  EXPECT_THROW(multiplier_law_from_string("uniform"), ConfigError);
}
