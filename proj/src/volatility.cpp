#include "volboot/volatility.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "volboot/errors.hpp"

namespace volboot {

namespace {

// Relative slack for round-off in the GARCH inversion.
constexpr double kInversionSlack = 1e-9;

void require_n(Eigen::Index n) {
  if (n < 1) throw ConfigError("volatility path: n must be >= 1");
}

}  // namespace

void SvSpec::validate() const {
  if (!(kappa >= 0.0)) throw ConfigError("SV: kappa must be >= 0");
  if (!(sigma_bar > 0.0)) throw ConfigError("SV: sigma_bar must be > 0");
  if (!(sigma_eta > 0.0)) throw ConfigError("SV: sigma_eta must be > 0");
}

double SvSpec::initial_log_variance() const {
  return initial_log_var.value_or(std::log(sigma_bar * sigma_bar));
}

void GarchSpec::validate() const {
  if (!(kappa >= 0.0)) throw ConfigError("GARCH: kappa must be >= 0");
  if (!(sigma_bar > 0.0)) throw ConfigError("GARCH: sigma_bar must be > 0");
  if (!(sigma_eta > 0.0)) throw ConfigError("GARCH: sigma_eta must be > 0");
  if (initial_var && !(*initial_var > 0.0)) {
    throw ConfigError("GARCH: initial variance must be > 0");
  }
}

double GarchSpec::initial_variance() const {
  return initial_var.value_or(sigma_bar * sigma_bar);
}

GarchCoefficients GarchCoefficients::at(const GarchSpec& spec, Eigen::Index n) {
  spec.validate();
  require_n(n);
  const double nd = static_cast<double>(n);
  GarchCoefficients c;
  c.omega = spec.sigma_bar * spec.sigma_bar * spec.kappa / nd;
  c.alpha = spec.sigma_eta / std::sqrt(2.0 * nd);
  c.beta = 1.0 - spec.kappa / nd - c.alpha;
  if (c.beta < 0.0) {
    std::ostringstream msg;
    msg << "GARCH coefficients invalid at n = " << n << ": beta_n = " << c.beta
        << " < 0 (increase n or lower sigma_eta/kappa)";
    throw ConfigError(msg.str());
  }
  return c;
}

void JumpSpec::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("jump: lambda must be > 0");
}

std::string describe(const VolatilitySpec& spec) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SvSpec>) {
          os << "sv(kappa=" << s.kappa << ", sigma_bar=" << s.sigma_bar
             << ", sigma_eta=" << s.sigma_eta << ")";
        } else if constexpr (std::is_same_v<T, GarchSpec>) {
          os << "garch(kappa=" << s.kappa << ", sigma_bar=" << s.sigma_bar
             << ", sigma_eta=" << s.sigma_eta << ")";
        } else {
          os << "jump(omega0=" << s.omega0 << ", omega1=" << s.omega1
             << ", lambda=" << s.lambda << ")";
        }
      },
      spec);
  return os.str();
}

VolatilityPath gen_sv_path(const SvSpec& spec, Eigen::Index n, const SeedPath& seed) {
  spec.validate();
  require_n(n);
  const double nd = static_cast<double>(n);
  const double phi = std::exp(-spec.kappa / nd);
  const double log_bar = std::log(spec.sigma_bar * spec.sigma_bar);
  const double shock_scale = spec.sigma_eta / std::sqrt(nd);

  Xoshiro256pp engine(seed);
  boost::random::normal_distribution<double> normal;

  VolatilityPath path;
  path.spec = spec;
  path.needs_z = false;
  path.sigmas.resize(n);
  double log_var = spec.initial_log_variance();
  // eta_{t-1} enters s2_t, so eta_0 is a pre-sample draw.
  for (Eigen::Index t = 0; t < n; ++t) {
    log_var = phi * log_var + (1.0 - phi) * log_bar + shock_scale * normal(engine);
    path.sigmas[t] = std::exp(0.5 * log_var);
  }
  return path;
}

VolatilityPath gen_garch_path(const GarchSpec& spec, Eigen::Index n, const InnovationDraw& z) {
  const GarchCoefficients c = GarchCoefficients::at(spec, n);
  if (z.size() < n - 1) {
    throw ConfigError("gen_garch_path: innovation draw shorter than n - 1");
  }
  VolatilityPath path;
  path.spec = spec;
  path.needs_z = true;
  path.sigmas.resize(n);
  double var = spec.initial_variance();
  path.sigmas[0] = std::sqrt(var);
  for (Eigen::Index t = 1; t < n; ++t) {
    const double zp = z.z[t - 1];
    var = c.omega + c.alpha * var * zp * zp + c.beta * var;
    path.sigmas[t] = std::sqrt(var);
  }
  return path;
}

namespace {

template <class OnJump>
Eigen::VectorXd jump_levels(const JumpSpec& spec, Eigen::Index n, const SeedPath& seed,
                            OnJump&& on_jump) {
  spec.validate();
  require_n(n);
  const double p = spec.lambda / static_cast<double>(n);
  if (p > 1.0) throw ConfigError("jump: lambda / n must be <= 1");
  // Indicators and sizes come from separate streams so sizes are independent
  // of the indicator sequence.
  Xoshiro256pp indicator_engine(seed.child(Level::Volatility, 0));
  Xoshiro256pp size_engine(seed.child(Level::Volatility, 1));
  boost::random::normal_distribution<double> normal;
  const MixtureSpec& size_law = mixture_for(spec.jump_law);

  Eigen::VectorXd sigmas(n);
  double jumps = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double size = sample_mixture(size_law, size_engine, normal);
    if (indicator_engine.uniform01() < p) {
      jumps += size;
      on_jump();
    }
    sigmas[t] = std::exp(spec.omega0 + spec.omega1 * jumps);
  }
  return sigmas;
}

}  // namespace

VolatilityPath gen_jump_path(const JumpSpec& spec, Eigen::Index n, const SeedPath& seed) {
  VolatilityPath path;
  path.spec = spec;
  path.needs_z = false;
  path.sigmas = jump_levels(spec, n, seed, [] {});
  return path;
}

Eigen::Index count_jumps(const JumpSpec& spec, Eigen::Index n, const SeedPath& seed) {
  Eigen::Index count = 0;
  jump_levels(spec, n, seed, [&count] { ++count; });
  return count;
}

namespace {

double inverted_modulus(const GarchCoefficients& c, double var_t, double var_next) {
  const double numerator = var_next - c.omega - c.beta * var_t;
  const double z2 = numerator / (c.alpha * var_t);
  if (z2 < 0.0) {
    if (-numerator <= kInversionSlack * var_next) return 0.0;
    throw NumericalError("garch_inverted_modulus: negative squared innovation; path "
                         "was not generated by this GARCH spec");
  }
  return std::sqrt(z2);
}

}  // namespace

double garch_inverted_modulus(const GarchSpec& spec, const VolatilityPath& path, Eigen::Index t) {
  const Eigen::Index n = path.n();
  if (t < 1 || t > n - 1) {
    throw ConfigError("garch_inverted_modulus: t must lie in [1, n-1]");
  }
  const GarchCoefficients c = GarchCoefficients::at(spec, n);
  const double var_t = path.sigmas[t - 1] * path.sigmas[t - 1];
  const double var_next = path.sigmas[t] * path.sigmas[t];
  return inverted_modulus(c, var_t, var_next);
}

Eigen::VectorXd garch_inverted_moduli(const GarchSpec& spec, const VolatilityPath& path) {
  const Eigen::Index n = path.n();
  const GarchCoefficients c = GarchCoefficients::at(spec, n);
  Eigen::VectorXd out(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    out[t] = inverted_modulus(c, path.sigmas[t] * path.sigmas[t],
                              path.sigmas[t + 1] * path.sigmas[t + 1]);
  }
  return out;
}

void write_path_csv(std::ostream& os, const VolatilityPath& path) {
  os << "t,sigma\n" << std::setprecision(17);
  for (Eigen::Index t = 0; t < path.n(); ++t) {
    os << (t + 1) << ',' << path.sigmas[t] << '\n';
  }
}

Eigen::VectorXd read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,sigma") {
    throw ConfigError("path CSV: expected header 't,sigma'");
  }
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("path CSV: malformed row");
    const long t = std::stol(line.substr(0, comma));
    if (t != static_cast<long>(values.size()) + 1) {
      throw ConfigError("path CSV: rows out of order");
    }
    const double sigma = std::stod(line.substr(comma + 1));
    if (!(sigma > 0.0)) throw ConfigError("path CSV: sigma must be > 0");
    values.push_back(sigma);
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace volboot
