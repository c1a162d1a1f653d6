#include "volboot/distributions.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>

#include "volboot/errors.hpp"

namespace volboot {

namespace {

constexpr double kPresetTolerance = 1e-12;

double normal_pdf(double z, double mu, double sd) {
  const double u = (z - mu) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

MixtureSpec checked_preset(MixtureSpec spec) {
  spec.validate();
  if (std::abs(spec.mean()) > kPresetTolerance ||
      std::abs(spec.variance() - 1.0) > kPresetTolerance) {
    throw ConfigError("mixture preset is not standardized");
  }
  return spec;
}

}  // namespace

MixtureSpec MixtureSpec::standard_normal() { return MixtureSpec{}; }

MixtureSpec MixtureSpec::dgp2() {
  const double a = std::sqrt(3.0 / 11.0);
  return checked_preset({{1.0 / 3.0, 2.0 / 3.0}, {-2.0 * a, a}, {a, a * std::sqrt(2.0)}});
}

MixtureSpec MixtureSpec::dgp3() {
  const double b = std::sqrt(3.0 / 10.0);
  return checked_preset({{1.0 / 3.0, 2.0 / 3.0}, {-2.0 * b, b}, {b * std::sqrt(2.0), b}});
}

void MixtureSpec::validate() const {
  for (std::size_t k = 0; k < 2; ++k) {
    if (!(weights[k] >= 0.0 && weights[k] <= 1.0)) {
      throw ConfigError("mixture weight outside [0,1]");
    }
    if (!(sds[k] > 0.0)) throw ConfigError("mixture sd must be positive");
  }
  if (std::abs(weights[0] + weights[1] - 1.0) > kPresetTolerance) {
    throw ConfigError("mixture weights must sum to 1");
  }
}

double MixtureSpec::mean() const {
  return weights[0] * means[0] + weights[1] * means[1];
}

double MixtureSpec::variance() const {
  double second = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    second += weights[k] * (sds[k] * sds[k] + means[k] * means[k]);
  }
  const double m = mean();
  return second - m * m;
}

double MixtureSpec::third_central_moment() const {
  const double m = mean();
  double out = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double d = means[k] - m;
    out += weights[k] * (d * d * d + 3.0 * d * sds[k] * sds[k]);
  }
  return out;
}

double mixture_pdf(const MixtureSpec& spec, double z) {
  double out = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    if (spec.weights[k] > 0.0) {
      out += spec.weights[k] * normal_pdf(z, spec.means[k], spec.sds[k]);
    }
  }
  return out;
}

const MixtureSpec& mixture_for(InnovationLaw law) {
  static const MixtureSpec gaussian = MixtureSpec::standard_normal();
  static const MixtureSpec dgp2 = MixtureSpec::dgp2();
  static const MixtureSpec dgp3 = MixtureSpec::dgp3();
  switch (law) {
    case InnovationLaw::Gaussian: return gaussian;
    case InnovationLaw::Dgp2: return dgp2;
    case InnovationLaw::Dgp3: return dgp3;
  }
  throw ConfigError("unknown innovation law");
}

std::string_view to_string(InnovationLaw law) {
  switch (law) {
    case InnovationLaw::Gaussian: return "dgp1";
    case InnovationLaw::Dgp2: return "dgp2";
    case InnovationLaw::Dgp3: return "dgp3";
  }
  return "?";
}

InnovationLaw innovation_law_from_string(std::string_view s) {
  if (s == "1" || s == "dgp1" || s == "gaussian") return InnovationLaw::Gaussian;
  if (s == "2" || s == "dgp2") return InnovationLaw::Dgp2;
  if (s == "3" || s == "dgp3") return InnovationLaw::Dgp3;
  throw ConfigError("unknown innovation law '" + std::string(s) + "' (expected 1, 2 or 3)");
}

double sign_of(double z) {
  if (z == 0.0) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::cerr << "volboot: warning: exact zero draw, sign mapped to +1\n";
    }
    return 1.0;
  }
  return z > 0.0 ? 1.0 : -1.0;
}

InnovationDraw InnovationDraw::from_values(Eigen::VectorXd z) {
  InnovationDraw out;
  out.modulus = z.cwiseAbs();
  out.sign = z.unaryExpr([](double v) { return sign_of(v); });
  out.z = std::move(z);
  return out;
}

InnovationDraw draw_innovations(InnovationLaw law, Eigen::Index n, const SeedPath& seed) {
  if (n < 1) throw ConfigError("draw_innovations: n must be >= 1");
  Xoshiro256pp engine(seed);
  boost::random::normal_distribution<double> normal;
  Eigen::VectorXd z(n);
  if (law == InnovationLaw::Gaussian) {
    for (Eigen::Index t = 0; t < n; ++t) z[t] = normal(engine);
  } else {
    const MixtureSpec& spec = mixture_for(law);
    for (Eigen::Index t = 0; t < n; ++t) z[t] = sample_mixture(spec, engine, normal);
  }
  return InnovationDraw::from_values(std::move(z));
}

double positive_sign_probability(const MixtureSpec& spec, double modulus) {
  const double up = mixture_pdf(spec, modulus);
  const double down = mixture_pdf(spec, -modulus);
  const double total = up + down;
  // Both densities underflow far in the tails; fall back to the log-ratio.
  if (!(total > 0.0)) {
    double log_up = -INFINITY;
    double log_down = -INFINITY;
    for (std::size_t k = 0; k < 2; ++k) {
      if (spec.weights[k] == 0.0) continue;
      const double base = std::log(spec.weights[k] / spec.sds[k]);
      const double u = (modulus - spec.means[k]) / spec.sds[k];
      const double d = (-modulus - spec.means[k]) / spec.sds[k];
      log_up = std::max(log_up, base - 0.5 * u * u);
      log_down = std::max(log_down, base - 0.5 * d * d);
    }
    return 1.0 / (1.0 + std::exp(log_down - log_up));
  }
  return up / total;
}

Eigen::VectorXd conditional_sign_redraw(const Eigen::Ref<const Eigen::VectorXd>& moduli,
                                        InnovationLaw law, const SeedPath& seed) {
  if ((moduli.array() <= 0.0).any()) {
    throw ConfigError("conditional_sign_redraw: moduli must be positive");
  }
  const MixtureSpec& spec = mixture_for(law);
  Xoshiro256pp engine(seed);
  Eigen::VectorXd signs(moduli.size());
  for (Eigen::Index t = 0; t < moduli.size(); ++t) {
    const double p = law == InnovationLaw::Gaussian
                         ? 0.5
                         : positive_sign_probability(spec, moduli[t]);
    signs[t] = engine.uniform01() < p ? 1.0 : -1.0;
  }
  return signs;
}

std::string_view to_string(MultiplierLaw law) {
  switch (law) {
    case MultiplierLaw::GaussianStd: return "gaussian";
    case MultiplierLaw::Rademacher: return "rademacher";
    case MultiplierLaw::MammenTwoPoint: return "mammen";
  }
  return "?";
}

MultiplierLaw multiplier_law_from_string(std::string_view s) {
  if (s == "gaussian" || s == "normal") return MultiplierLaw::GaussianStd;
  if (s == "rademacher") return MultiplierLaw::Rademacher;
  if (s == "mammen") return MultiplierLaw::MammenTwoPoint;
  throw ConfigError("unknown multiplier law '" + std::string(s) + "'");
}

void fill_multipliers(MultiplierLaw law, const SeedPath& seed, Eigen::Ref<Eigen::VectorXd> out) {
  Xoshiro256pp engine(seed);
  switch (law) {
    case MultiplierLaw::GaussianStd: {
      boost::random::normal_distribution<double> normal;
      for (Eigen::Index t = 0; t < out.size(); ++t) out[t] = normal(engine);
      break;
    }
    case MultiplierLaw::Rademacher: {
      // 64 signs per engine call.
      std::uint64_t bits = 0;
      for (Eigen::Index t = 0; t < out.size(); ++t) {
        if (t % 64 == 0) bits = engine();
        out[t] = (bits >> (t % 64)) & 1U ? 1.0 : -1.0;
      }
      break;
    }
    case MultiplierLaw::MammenTwoPoint: {
      for (Eigen::Index t = 0; t < out.size(); ++t) {
        out[t] = engine.uniform01() < mammen::kHighProbability ? mammen::kHigh : mammen::kLow;
      }
      break;
    }
  }
}

Eigen::VectorXd draw_multipliers(MultiplierLaw law, Eigen::Index n, const SeedPath& seed) {
  if (n < 1) throw ConfigError("draw_multipliers: n must be >= 1");
  Eigen::VectorXd out(n);
  fill_multipliers(law, seed, out);
  return out;
}

}  // namespace volboot
