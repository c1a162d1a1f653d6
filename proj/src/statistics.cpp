#include "volboot/statistics.hpp"

#include <cctype>
#include <string>

namespace volboot {

PartialSumPair partial_sums(const Eigen::Ref<const Eigen::VectorXd>& eps,
                            const VolatilityPath* sigma) {
  const Eigen::Index n = eps.size();
  if (n < 1) throw ConfigError("partial_sums: empty innovation sequence");
  if (sigma && sigma->n() != n) throw ConfigError("partial_sums: sigma length differs from eps");
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);

  PartialSumPair out;
  out.n = n;
  out.m_grid.setZero(n + 1);
  out.u_grid.setZero(n + 1);
  double m = 0.0;
  double u = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    m += eps[t];
    u += eps[t] * eps[t];
    out.m_grid[t + 1] = m / root_n;
    out.u_grid[t + 1] = u / nd;
  }
  if (sigma) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
    double acc = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      acc += sigma->sigmas[t] * sigma->sigmas[t];
      v[t + 1] = acc / nd;
    }
    out.v_grid = std::move(v);
  }
  return out;
}

double sup_quadratic_variation_gap(const PartialSumPair& sums) {
  if (!sums.v_grid) throw ConfigError("sup_quadratic_variation_gap: V_n not available");
  return (sums.u_grid - *sums.v_grid).cwiseAbs().maxCoeff();
}

Problem problem_of(StatKind kind) {
  switch (kind) {
    case StatKind::S:
    case StatKind::T:
    case StatKind::Tnull: return Problem::Location;
    case StatKind::CS:
    case StatKind::CT: return Problem::Cusum;
    case StatKind::R:
    case StatKind::W: return Problem::UnitRoot;
  }
  throw ConfigError("unknown statistic");
}

Tail tail_of(StatKind kind) {
  return problem_of(kind) == Problem::Cusum ? Tail::Right : Tail::Left;
}

bool is_studentized(StatKind kind) {
  return kind == StatKind::T || kind == StatKind::Tnull || kind == StatKind::CT ||
         kind == StatKind::W;
}

std::string_view to_string(Problem problem) {
  switch (problem) {
    case Problem::Location: return "location";
    case Problem::Cusum: return "cusum";
    case Problem::UnitRoot: return "unitroot";
  }
  return "?";
}

std::string_view to_string(StatKind kind) {
  switch (kind) {
    case StatKind::S: return "S";
    case StatKind::T: return "T";
    case StatKind::Tnull: return "Tnull";
    case StatKind::CS: return "CS";
    case StatKind::CT: return "CT";
    case StatKind::R: return "R";
    case StatKind::W: return "W";
  }
  return "?";
}

std::string_view to_string(Tail tail) { return tail == Tail::Left ? "left" : "right"; }

StatKind stat_kind_from_string(std::string_view s) {
  std::string lower(s);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "s") return StatKind::S;
  if (lower == "t") return StatKind::T;
  if (lower == "tnull") return StatKind::Tnull;
  if (lower == "cs") return StatKind::CS;
  if (lower == "ct") return StatKind::CT;
  if (lower == "r") return StatKind::R;
  if (lower == "w") return StatKind::W;
  throw ConfigError("unknown test statistic '" + std::string(s) +
                    "' (expected s, t, tnull, cs, ct, r or w)");
}

Problem problem_from_string(std::string_view s) {
  if (s == "location") return Problem::Location;
  if (s == "cusum") return Problem::Cusum;
  if (s == "unitroot" || s == "unit-root") return Problem::UnitRoot;
  throw ConfigError("unknown testing problem '" + std::string(s) + "'");
}

namespace {

Sample make_sample(Eigen::VectorXd y, Problem model, double theta_bar) {
  if (y.size() < 2) throw ConfigError("sample: n must be >= 2");
  Sample s;
  s.y = std::move(y);
  s.model = model;
  s.theta_bar = theta_bar;
  return s;
}

void require_model(const Sample& sample, Problem expected) {
  if (sample.model != expected) {
    throw ConfigError("statistic for problem '" + std::string(to_string(expected)) +
                      "' applied to a '" + std::string(to_string(sample.model)) + "' sample");
  }
  if (sample.y.size() < 2) throw ConfigError("sample: n must be >= 2");
}

}  // namespace

Sample Sample::location(Eigen::VectorXd y, double theta_bar) {
  return make_sample(std::move(y), Problem::Location, theta_bar);
}
Sample Sample::cusum(Eigen::VectorXd y) { return make_sample(std::move(y), Problem::Cusum, 0.0); }
Sample Sample::unit_root(Eigen::VectorXd y) {
  return make_sample(std::move(y), Problem::UnitRoot, 0.0);
}

namespace functional {

namespace {
double m1(const PartialSumPair& p) { return p.m_grid[p.n]; }
double u1(const PartialSumPair& p) { return p.u_grid[p.n]; }
double nd(const PartialSumPair& p) { return static_cast<double>(p.n); }
}  // namespace

double location_s(const PartialSumPair& p) { return m1(p); }

double location_t(const PartialSumPair& p) {
  return m1(p) / std::sqrt(u1(p) - m1(p) * m1(p) / nd(p));
}

double location_tnull(const PartialSumPair& p) { return m1(p) / std::sqrt(u1(p)); }

double cusum_cs(const PartialSumPair& p) {
  double best = 0.0;
  for (Eigen::Index t = 1; t <= p.n; ++t) {
    const double u = static_cast<double>(t) / nd(p);
    best = std::max(best, std::abs(p.m_grid[t] - u * m1(p)));
  }
  return best;
}

double cusum_ct(const PartialSumPair& p) {
  return cusum_cs(p) / std::sqrt(u1(p) - m1(p) * m1(p) / nd(p));
}

double integrated_square(const PartialSumPair& p) {
  return p.m_grid.head(p.n).squaredNorm() / nd(p);
}

double unitroot_r(const PartialSumPair& p) {
  return 0.5 * (m1(p) * m1(p) - u1(p)) / integrated_square(p);
}

double unitroot_w(const PartialSumPair& p) {
  const double num = 0.5 * (m1(p) * m1(p) - u1(p));
  const double isq = integrated_square(p);
  return num / std::sqrt(isq) / std::sqrt(u1(p) - num * num / isq / nd(p));
}

}  // namespace functional

StatValue stat_location(const Sample& sample, bool studentize, bool null_variance) {
  require_model(sample, Problem::Location);
  if (!studentize) {
    return {StatKind::S, kernels::location_s(sample.y, sample.theta_bar), Tail::Left};
  }
  const StatKind kind = null_variance ? StatKind::Tnull : StatKind::T;
  return {kind, kernels::location_t(sample.y, sample.theta_bar, null_variance), Tail::Left};
}

StatValue stat_cusum(const Sample& sample, bool studentize) {
  require_model(sample, Problem::Cusum);
  return {studentize ? StatKind::CT : StatKind::CS, kernels::cusum(sample.y, studentize),
          Tail::Right};
}

StatValue stat_unitroot(const Sample& sample, bool studentize) {
  require_model(sample, Problem::UnitRoot);
  const auto df = kernels::dickey_fuller(sample.y, studentize);
  return studentize ? StatValue{StatKind::W, df.ratio, Tail::Left}
                    : StatValue{StatKind::R, df.coefficient, Tail::Left};
}

StatValue compute_statistic(StatKind kind, const Sample& sample) {
  switch (kind) {
    case StatKind::S: return stat_location(sample, false, false);
    case StatKind::T: return stat_location(sample, true, false);
    case StatKind::Tnull: return stat_location(sample, true, true);
    case StatKind::CS: return stat_cusum(sample, false);
    case StatKind::CT: return stat_cusum(sample, true);
    case StatKind::R: return stat_unitroot(sample, false);
    case StatKind::W: return stat_unitroot(sample, true);
  }
  throw ConfigError("unknown statistic");
}

}  // namespace volboot
