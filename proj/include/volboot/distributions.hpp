#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

#include "volboot/rng.hpp"

namespace volboot {

/// Two-component normal mixture  w1 N(mu1, s1^2) + w2 N(mu2, s2^2).
struct MixtureSpec {
  std::array<double, 2> weights{1.0, 0.0};
  std::array<double, 2> means{0.0, 0.0};
  std::array<double, 2> sds{1.0, 1.0};

  static MixtureSpec standard_normal();
  // mu = (-2a, a), s = (a, a sqrt 2), a = sqrt(3/11): zero skewness.
  static MixtureSpec dgp2();
  // mu = (-2b, b), s = (b sqrt 2, b), b = sqrt(3/10): negative skewness.
  static MixtureSpec dgp3();

  /// Throws ConfigError unless weights lie in [0,1] and sum to 1 and sds > 0.
  void validate() const;

  double mean() const;
  double variance() const;
  double third_central_moment() const;
  double skewness() const { return third_central_moment() / std::pow(variance(), 1.5); }
};

double mixture_pdf(const MixtureSpec& spec, double z);

/// Law of the standardized innovations z_t.
enum class InnovationLaw { Gaussian, Dgp2, Dgp3 };

const MixtureSpec& mixture_for(InnovationLaw law);
std::string_view to_string(InnovationLaw law);
InnovationLaw innovation_law_from_string(std::string_view s);

/// Standardized errors with their modulus/sign decomposition
/// z_t = sign_t * modulus_t.
struct InnovationDraw {
  Eigen::VectorXd z;
  Eigen::VectorXd modulus;
  Eigen::VectorXd sign;  // entries in {-1, +1}

  Eigen::Index size() const { return z.size(); }
  static InnovationDraw from_values(Eigen::VectorXd z);
};

/// Sign of a draw. sgn(0) is mapped to +1 (a warning is logged once per
/// process).
double sign_of(double z);

/// One draw from `spec` by component indicator, then a normal draw.
template <class Engine>
double sample_mixture(const MixtureSpec& spec, Engine& engine,
                      boost::random::normal_distribution<double>& normal) {
  const std::size_t k = engine.uniform01() < spec.weights[0] ? 0 : 1;
  return spec.means[k] + spec.sds[k] * normal(engine);
}

InnovationDraw draw_innovations(InnovationLaw law, Eigen::Index n, const SeedPath& seed);

/// P(sign = +1 | |z| = modulus) = f(m) / (f(m) + f(-m)).
double positive_sign_probability(const MixtureSpec& spec, double modulus);

/// Independent signs given moduli, each +1 with
/// positive_sign_probability(mixture_for(law), modulus_t).
Eigen::VectorXd conditional_sign_redraw(const Eigen::Ref<const Eigen::VectorXd>& moduli,
                                        InnovationLaw law, const SeedPath& seed);

/// Wild-bootstrap multiplier law; every law has mean 0 and variance 1.
enum class MultiplierLaw { GaussianStd, Rademacher, MammenTwoPoint };

std::string_view to_string(MultiplierLaw law);
MultiplierLaw multiplier_law_from_string(std::string_view s);

namespace mammen {
inline const double kLow = -(std::sqrt(5.0) - 1.0) / 2.0;
inline const double kHigh = (std::sqrt(5.0) + 1.0) / 2.0;
// P(w = kHigh)
inline const double kHighProbability = (std::sqrt(5.0) - 1.0) / (2.0 * std::sqrt(5.0));
}  // namespace mammen

/// Fills `out` with i.i.d. multipliers drawn from the stream of `seed`.
void fill_multipliers(MultiplierLaw law, const SeedPath& seed, Eigen::Ref<Eigen::VectorXd> out);

Eigen::VectorXd draw_multipliers(MultiplierLaw law, Eigen::Index n, const SeedPath& seed);

}  // namespace volboot
