#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "volboot/errors.hpp"
#include "volboot/io.hpp"
#include "volboot/limitoracle.hpp"
#include "volboot/montecarlo.hpp"

namespace volboot::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kPaperSizeReps = 50000;
constexpr int kPaperPowerReps = 10000;

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Output files are written under temporary names and renamed together on
/// commit(); without a commit every temporary is removed.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}
  ArtifactSet(const ArtifactSet&) = delete;
  ArtifactSet& operator=(const ArtifactSet&) = delete;

  ~ArtifactSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, final_path] : files_) fs::remove(tmp, ec);
  }

  std::ofstream open(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const fs::path final_path = dir_ / name;
    const fs::path tmp = dir_ / (name + ".partial");
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + final_path.string());
    files_.emplace_back(tmp, final_path);
    return os;
  }

  const fs::path& dir() const { return dir_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [tmp, final_path] : files_) out.push_back(final_path.string());
    return out;
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) fs::rename(tmp, final_path);
    committed_ = true;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> files_;
  bool committed_ = false;
};

void close_checked(std::ofstream& os, const std::string& what) {
  os.close();
  if (!os) throw ConfigError("failed writing " + what);
}

struct Options {
  std::string dgp = "1";
  std::string vol = "garch";
  std::string test = "tnull";
  double kappa = 5.0;
  double sigma_bar = 1.0;
  double sigma_eta = std::sqrt(10.0);
  double lambda = 2.0;
  double omega0 = 0.0;
  double omega1 = 0.5;
  long n = 0;
  int paths = 100;
  int reps = 0;
  int B = 199;
  std::string law = "gaussian";
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string out = ".";
  bool paper_scale = false;
  double alpha = 0.05;
  std::string c_grid;
  // oracle
  std::string kind = "garch";
  int steps = 10000;
  double rho = 0.0;
  std::string drift_sign = "mean-reverting";
  bool exact_ou = false;
  std::string manifest;
};

void add_output_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--seed", o.seed, "Master seed (falls back to $VOLBOOT_SEED, then 42)");
  cmd.add_option("--threads", o.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out, "Output directory");
}

void add_experiment_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--dgp", o.dgp, "Innovation law: 1 (Gaussian), 2 (zero-skew mixture), 3 (skewed mixture)");
  cmd.add_option("--vol", o.vol, "Volatility model: garch, sv or jump");
  cmd.add_option("--test", o.test, "Statistic: s, t, tnull, cs, ct, r, w");
  cmd.add_option("--kappa", o.kappa, "Mean-reversion rate");
  cmd.add_option("--sigma-bar", o.sigma_bar, "Baseline volatility");
  cmd.add_option("--sigma-eta", o.sigma_eta, "Volatility of volatility");
  cmd.add_option("--lambda", o.lambda, "Jump intensity (jump volatility)");
  cmd.add_option("--omega0", o.omega0, "Log-volatility level (jump volatility)");
  cmd.add_option("--omega1", o.omega1, "Jump loading (jump volatility)");
  cmd.add_option("--n", o.n, "Sample size");
  cmd.add_option("--paths", o.paths, "Number of volatility paths");
  cmd.add_option("--reps", o.reps, "Conditional replications per path");
  cmd.add_option("--B", o.B, "Bootstrap replications");
  cmd.add_option("--law", o.law, "Multiplier law: gaussian, rademacher, mammen");
  cmd.add_option("--alpha", o.alpha, "Significance level");
  cmd.add_flag("--paper-scale", o.paper_scale, "Use the full replication budget");
  add_output_options(cmd, o);
}

VolatilitySpec volatility_from(const Options& o) {
  if (o.vol == "garch") return GarchSpec{o.kappa, o.sigma_bar, o.sigma_eta, std::nullopt};
  if (o.vol == "sv") return SvSpec{o.kappa, o.sigma_bar, o.sigma_eta, std::nullopt};
  if (o.vol == "jump") return JumpSpec{o.omega0, o.omega1, o.lambda, InnovationLaw::Gaussian};
  throw ConfigError("unknown volatility model '" + o.vol + "' (expected garch, sv or jump)");
}

double parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed grid value '" + text + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    // lo:hi:step
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_number(item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError("grid range must be lo:hi:step with step > 0");
    }
    const int count = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (int k = 0; k <= count; ++k) grid.push_back(parts[0] + k * parts[2]);
    return grid;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    grid.push_back(parse_number(item));
  }
  return grid;
}

std::vector<double> default_c_grid(Problem problem) {
  switch (problem) {
    case Problem::Location: return parse_grid("0:8:0.5");
    case Problem::Cusum: return parse_grid("0:15:1");
    case Problem::UnitRoot: return parse_grid("0:20:1");
  }
  return {};
}

ExperimentConfig experiment_from(const Options& o, bool power) {
  ExperimentConfig config;
  config.dgp = innovation_law_from_string(o.dgp);
  config.vol = volatility_from(o);
  config.stat = stat_kind_from_string(o.test);
  config.n = o.n > 0 ? o.n : (power ? 100 : 500);
  config.n_paths = o.paths;
  const int default_reps = power ? (o.paper_scale ? kPaperPowerReps : 1000)
                                 : (o.paper_scale ? kPaperSizeReps : 1000);
  config.n_reps = o.reps > 0 ? o.reps : default_reps;
  config.B = o.B;
  config.law = multiplier_law_from_string(o.law);
  config.master_seed = o.seed;
  config.alpha = o.alpha;
  config.threads = o.threads;
  if (power) {
    Alternative alt;
    alt.kind = config.problem();
    alt.c_grid = o.c_grid.empty() ? default_c_grid(alt.kind) : parse_grid(o.c_grid);
    config.alternative = std::move(alt);
  }
  config.validate();
  return config;
}

/// Arguments worth recording: everything except the output directory.
std::vector<std::string> reproducible_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

nlohmann::json manifest_skeleton(const std::vector<std::string>& args, std::uint64_t seed) {
  nlohmann::json m;
  m["tool"] = "volboot";
  m["version"] = VOLBOOT_VERSION;
  m["args"] = reproducible_args(args);
  m["seed"] = seed;
  return m;
}

void finish_manifest(nlohmann::json& manifest, ArtifactSet& artifacts,
                     std::chrono::system_clock::time_point start) {
  const auto end = std::chrono::system_clock::now();
  manifest["started_at"] = utc_timestamp(start);
  manifest["finished_at"] = utc_timestamp(end);
  manifest["wall_clock_seconds"] = std::chrono::duration<double>(end - start).count();
  std::vector<std::string> outputs = artifacts.names();
  outputs.push_back((artifacts.dir() / "manifest.json").string());
  manifest["outputs"] = outputs;
  std::ofstream os = artifacts.open("manifest.json");
  os << manifest.dump(2) << '\n';
  close_checked(os, "manifest.json");
}

int cmd_size(const Options& o, const std::vector<std::string>& args) {
  const auto start = std::chrono::system_clock::now();
  const ExperimentConfig config = experiment_from(o, false);
  const FanChartTable table = run_size_experiment(config);

  ArtifactSet artifacts(o.out);
  {
    std::ofstream os = artifacts.open("fanchart.csv");
    io::write_fanchart_csv(os, table);
    close_checked(os, "fanchart.csv");
  }
  {
    std::ofstream os = artifacts.open("fanchart.svg");
    io::render_fanchart(os, table);
    close_checked(os, "fanchart.svg");
  }
  nlohmann::json manifest = manifest_skeleton(args, config.master_seed);
  manifest["command"] = "size";
  manifest["config"] = config.to_json();
  const Eigen::Index k_alpha = table.q_index(config.alpha);
  if (k_alpha >= 0) manifest["unconditional_rejection"] = table.unconditional_cdf[k_alpha];
  finish_manifest(manifest, artifacts, start);
  artifacts.commit();

  std::cout << "size: " << table.n_paths() << " paths x " << config.n_reps << " reps, stat "
            << to_string(config.stat) << ", " << to_string(config.dgp) << '\n';
  if (k_alpha >= 0) {
    std::cout << "unconditional P(p* <= " << config.alpha
              << ") = " << table.unconditional_cdf[k_alpha] << '\n';
  }
  std::cout << "unconditional KS to U(0,1) = "
            << ks_distance(table.unconditional_cdf.transpose(), table.q_grid,
                           ReferenceCdf::Uniform01)
            << '\n';
  return kSuccess;
}

int cmd_power(const Options& o, const std::vector<std::string>& args) {
  const auto start = std::chrono::system_clock::now();
  const ExperimentConfig config = experiment_from(o, true);
  const PowerTable table = run_power_experiment(config);

  ArtifactSet artifacts(o.out);
  {
    std::ofstream os = artifacts.open("power.csv");
    io::write_power_csv(os, table);
    close_checked(os, "power.csv");
  }
  {
    std::ofstream os = artifacts.open("power.svg");
    io::render_power(os, table);
    close_checked(os, "power.svg");
  }
  nlohmann::json manifest = manifest_skeleton(args, config.master_seed);
  manifest["command"] = "power";
  manifest["config"] = config.to_json();
  manifest["path_mean_variance"] = std::vector<double>(
      table.path_mean_variance.data(), table.path_mean_variance.data() + table.path_mean_variance.size());
  finish_manifest(manifest, artifacts, start);
  artifacts.commit();

  const Eigen::RowVectorXd mean = table.per_path_rejection.colwise().mean();
  std::cout << "power: " << table.n_paths() << " paths x " << config.n_reps << " reps, stat "
            << to_string(config.stat) << '\n';
  for (std::size_t k = 0; k < table.c_grid.size(); ++k) {
    std::cout << "  c = " << table.c_grid[k] << "  mean rejection = "
              << mean[static_cast<Eigen::Index>(k)] << '\n';
  }
  return kSuccess;
}

int cmd_oracle(const Options& o, const std::vector<std::string>& args) {
  const auto start = std::chrono::system_clock::now();
  OracleConfig config;
  config.spec.kind = diffusion_kind_from_string(o.kind);
  config.spec.kappa = o.kappa;
  config.spec.sigma_bar = o.sigma_bar;
  config.spec.sigma_eta = o.sigma_eta;
  config.spec.correlation = o.rho;
  if (o.drift_sign == "mean-reverting") {
    config.spec.drift_sign = DriftSign::MeanReverting;
  } else if (o.drift_sign == "printed") {
    config.spec.drift_sign = DriftSign::Printed;
  } else {
    throw ConfigError("--drift-sign must be mean-reverting or printed");
  }
  config.spec.exact_ou = o.exact_ou;
  config.steps = o.steps;
  config.reps = o.reps > 0 ? o.reps : 2000;
  config.discrete_n = o.n > 0 ? o.n : 20000;
  config.dgp = innovation_law_from_string(o.dgp);
  config.master_seed = o.seed;
  config.threads = o.threads;
  config.validate();

  const OracleComparison result = compare_discrete_to_limit(config);

  ArtifactSet artifacts(o.out);
  {
    std::ofstream os = artifacts.open("oracle.csv");
    io::write_functionals_csv(os, result.limit_v1, result.limit_m1);
    close_checked(os, "oracle.csv");
  }
  if (!result.discrete_v1.empty()) {
    std::ofstream os = artifacts.open("discrete.csv");
    io::write_functionals_csv(os, result.discrete_v1, result.discrete_m1);
    close_checked(os, "discrete.csv");
  }
  {
    std::ofstream os = artifacts.open("oracle_summary.csv");
    io::write_oracle_summary_csv(os, config, result);
    close_checked(os, "oracle_summary.csv");
  }
  nlohmann::json manifest = manifest_skeleton(args, config.master_seed);
  manifest["command"] = "oracle";
  manifest["config"] = {{"kind", std::string(to_string(config.spec.kind))},
                        {"kappa", config.spec.kappa},
                        {"sigma_bar", config.spec.sigma_bar},
                        {"sigma_eta", config.spec.sigma_eta},
                        {"rho", config.spec.correlation},
                        {"drift_sign", o.drift_sign},
                        {"exact_ou", config.spec.exact_ou},
                        {"steps", config.steps},
                        {"reps", config.reps},
                        {"discrete_n", config.discrete_n},
                        {"dgp", std::string(to_string(config.dgp))}};
  manifest["ks_v1"] = result.ks_v1;
  manifest["ks_m1"] = result.ks_m1;
  finish_manifest(manifest, artifacts, start);
  artifacts.commit();

  io::write_oracle_summary_csv(std::cout, config, result);
  return kSuccess;
}

int dispatch(const std::vector<std::string>& args);

int cmd_rerun(const Options& o) {
  std::ifstream is(o.manifest);
  if (!is) throw ConfigError("cannot read manifest " + o.manifest);
  nlohmann::json manifest;
  try {
    is >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.contains("args")) throw ConfigError("manifest has no recorded args");
  std::vector<std::string> args = manifest["args"].get<std::vector<std::string>>();
  // The seed may have come from the environment; pin it.
  const bool has_seed = std::any_of(args.begin(), args.end(), [](const std::string& a) {
    return a == "--seed" || a.rfind("--seed=", 0) == 0;
  });
  if (!has_seed && manifest.contains("seed")) {
    args.push_back("--seed");
    args.push_back(std::to_string(manifest["seed"].get<std::uint64_t>()));
  }
  args.push_back("--out");
  args.push_back(o.out);
  return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Wild bootstrap tests under non-stationary stochastic volatility", "volboot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VOLBOOT_VERSION);

  Options o;
  if (const char* env = std::getenv("VOLBOOT_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("VOLBOOT_SEED is not an unsigned integer");
    }
  }

  CLI::App* size = app.add_subcommand("size", "Conditional size experiment (fan chart of p-value cdfs)");
  add_experiment_options(*size, o);

  CLI::App* power = app.add_subcommand("power", "Conditional local power experiment");
  add_experiment_options(*power, o);
  power->add_option("--c-grid", o.c_grid, "Noncentrality grid: 'lo:hi:step' or comma list");

  CLI::App* oracle = app.add_subcommand("oracle", "Diffusion-limit oracle vs discrete recursion");
  oracle->add_option("--kind", o.kind, "garch or logou");
  oracle->add_option("--steps", o.steps, "Euler steps on [0,1]");
  oracle->add_option("--reps", o.reps, "Replicates");
  oracle->add_option("--n", o.n, "Sample size of the discrete recursion");
  oracle->add_option("--kappa", o.kappa, "Mean-reversion rate");
  oracle->add_option("--sigma-bar", o.sigma_bar, "Baseline volatility");
  oracle->add_option("--sigma-eta", o.sigma_eta, "Volatility of volatility");
  oracle->add_option("--rho", o.rho, "corr(dB_eta, dB_z)");
  oracle->add_option("--drift-sign", o.drift_sign, "mean-reverting or printed");
  oracle->add_flag("--exact-ou", o.exact_ou, "Exact OU transitions (logou)");
  oracle->add_option("--dgp", o.dgp, "Innovation law of the discrete recursion");
  add_output_options(*oracle, o);

  CLI::App* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  rerun->add_option("manifest", o.manifest, "manifest.json of a completed run")->required();
  rerun->add_option("--out", o.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (size->parsed()) return cmd_size(o, args);
  if (power->parsed()) return cmd_power(o, args);
  if (oracle->parsed()) return cmd_oracle(o, args);
  return cmd_rerun(o);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const ConfigError& e) {
    std::cerr << "volboot: error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "volboot: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "volboot: error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace volboot::cli
