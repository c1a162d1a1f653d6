#include "volboot/io.hpp"

#include <array>
#include <limits>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "volboot/errors.hpp"

namespace volboot::io {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), result.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s) {
  double value = 0.0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), value);
  if (result.ec != std::errc{} || result.ptr != s.data() + s.size()) {
    throw ConfigError("CSV: malformed number '" + s + "'");
  }
  return value;
}

void expect_header(std::istream& is, const std::string& header) {
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw ConfigError("CSV: expected header '" + header + "'");
  }
}

// Rows of (key, x, y) grouped by key in first-seen order.
struct KeyedRows {
  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::pair<double, double>>> rows;
};

KeyedRows read_keyed_rows(std::istream& is) {
  KeyedRows out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw ConfigError("CSV: expected 3 columns in '" + line + "'");
    auto [it, inserted] = out.rows.try_emplace(fields[0]);
    if (inserted) out.keys.push_back(fields[0]);
    it->second.emplace_back(parse_double(fields[1]), parse_double(fields[2]));
  }
  return out;
}

}  // namespace

void write_fanchart_csv(std::ostream& os, const FanChartTable& table) {
  os << "path_id,q,ecdf\n";
  for (Eigen::Index p = 0; p < table.n_paths(); ++p) {
    for (std::size_t k = 0; k < table.q_grid.size(); ++k) {
      os << p << ',' << format_double(table.q_grid[k]) << ','
         << format_double(table.per_path_cdf(p, static_cast<Eigen::Index>(k))) << '\n';
    }
  }
  for (std::size_t k = 0; k < table.q_grid.size(); ++k) {
    os << "mean," << format_double(table.q_grid[k]) << ','
       << format_double(table.unconditional_cdf[static_cast<Eigen::Index>(k)]) << '\n';
  }
}

FanChartTable read_fanchart_csv(std::istream& is) {
  expect_header(is, "path_id,q,ecdf");
  KeyedRows data = read_keyed_rows(is);
  const auto mean_it = data.rows.find("mean");
  if (mean_it == data.rows.end()) throw ConfigError("fan chart CSV: missing mean rows");
  FanChartTable table;
  for (const auto& [q, value] : mean_it->second) table.q_grid.push_back(q);
  const Eigen::Index nq = static_cast<Eigen::Index>(table.q_grid.size());
  table.unconditional_cdf.resize(nq);
  for (Eigen::Index k = 0; k < nq; ++k) table.unconditional_cdf[k] = mean_it->second[k].second;

  std::vector<std::string> path_keys;
  for (const auto& key : data.keys) {
    if (key != "mean") path_keys.push_back(key);
  }
  table.per_path_cdf.resize(static_cast<Eigen::Index>(path_keys.size()), nq);
  for (std::size_t p = 0; p < path_keys.size(); ++p) {
    if (path_keys[p] != std::to_string(p)) throw ConfigError("fan chart CSV: path ids out of order");
    const auto& rows = data.rows[path_keys[p]];
    if (static_cast<Eigen::Index>(rows.size()) != nq) {
      throw ConfigError("fan chart CSV: ragged q grid");
    }
    for (Eigen::Index k = 0; k < nq; ++k) {
      if (rows[k].first != table.q_grid[k]) throw ConfigError("fan chart CSV: q grid mismatch");
      table.per_path_cdf(static_cast<Eigen::Index>(p), k) = rows[k].second;
    }
  }
  return table;
}

void write_power_csv(std::ostream& os, const PowerTable& table) {
  os << "path_id,c,rejection_rate\n";
  for (Eigen::Index p = 0; p < table.n_paths(); ++p) {
    for (std::size_t k = 0; k < table.c_grid.size(); ++k) {
      os << p << ',' << format_double(table.c_grid[k]) << ','
         << format_double(table.per_path_rejection(p, static_cast<Eigen::Index>(k))) << '\n';
    }
  }
}

PowerTable read_power_csv(std::istream& is) {
  expect_header(is, "path_id,c,rejection_rate");
  KeyedRows data = read_keyed_rows(is);
  PowerTable table;
  if (data.keys.empty()) return table;
  for (const auto& [c, rate] : data.rows[data.keys.front()]) table.c_grid.push_back(c);
  const Eigen::Index nc = static_cast<Eigen::Index>(table.c_grid.size());
  table.per_path_rejection.resize(static_cast<Eigen::Index>(data.keys.size()), nc);
  for (std::size_t p = 0; p < data.keys.size(); ++p) {
    if (data.keys[p] != std::to_string(p)) throw ConfigError("power CSV: path ids out of order");
    const auto& rows = data.rows[data.keys[p]];
    if (static_cast<Eigen::Index>(rows.size()) != nc) throw ConfigError("power CSV: ragged c grid");
    for (Eigen::Index k = 0; k < nc; ++k) {
      if (rows[k].first != table.c_grid[k]) throw ConfigError("power CSV: c grid mismatch");
      table.per_path_rejection(static_cast<Eigen::Index>(p), k) = rows[k].second;
    }
  }
  return table;
}

void write_functionals_csv(std::ostream& os, const std::vector<double>& v1,
                           const std::vector<double>& m1) {
  os << "replicate,v1,m1\n";
  for (std::size_t r = 0; r < v1.size(); ++r) {
    os << r << ',' << format_double(v1[r]) << ',' << format_double(m1[r]) << '\n';
  }
}

void write_oracle_summary_csv(std::ostream& os, const OracleConfig& config,
                              const OracleComparison& result) {
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto variance = [&](const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  os << "kind,steps,discrete_n,reps,ks_v1,ks_m1,limit_v1_mean,limit_v1_var,"
        "discrete_v1_mean,discrete_v1_var\n";
  os << to_string(config.spec.kind) << ',' << config.steps << ',' << config.discrete_n << ','
     << config.reps << ',' << format_double(result.ks_v1) << ',' << format_double(result.ks_m1)
     << ',' << format_double(mean(result.limit_v1)) << ','
     << format_double(variance(result.limit_v1)) << ','
     << format_double(mean(result.discrete_v1)) << ','
     << format_double(variance(result.discrete_v1)) << '\n';
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

struct Frame {
  double x_max;

  double px(double x) const { return kLeft + (kWidth - kLeft - kRight) * x / x_max; }
  double py(double y) const { return kHeight - kBottom - (kHeight - kTop - kBottom) * y; }
};

std::string fixed(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

void open_svg(std::ostream& os, const Frame& f, const std::string& x_label,
              const std::string& y_label) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << fixed(f.px(0)) << "\" y1=\"" << fixed(f.py(0)) << "\" x2=\""
     << fixed(f.px(f.x_max)) << "\" y2=\"" << fixed(f.py(0)) << "\"/>\n";
  os << "<line x1=\"" << fixed(f.px(0)) << "\" y1=\"" << fixed(f.py(0)) << "\" x2=\""
     << fixed(f.px(0)) << "\" y2=\"" << fixed(f.py(1)) << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x_max * k / 4.0;
    const double y = k / 4.0;
    os << "<text x=\"" << fixed(f.px(x)) << "\" y=\"" << fixed(f.py(0) + 16)
       << "\" text-anchor=\"middle\">" << format_double(x) << "</text>\n";
    os << "<text x=\"" << fixed(f.px(0) - 6) << "\" y=\"" << fixed(f.py(y) + 4)
       << "\" text-anchor=\"end\">" << format_double(y) << "</text>\n";
  }
  os << "<text x=\"" << fixed(f.px(f.x_max / 2)) << "\" y=\"" << fixed(kHeight - 12)
     << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << fixed(f.py(0.5)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << fixed(f.py(0.5)) << ")\">" << y_label << "</text>\n";
  os << "</g>\n";
}

template <class Ys>
void polyline(std::ostream& os, const Frame& f, const std::vector<double>& xs, const Ys& ys,
              const std::string& style) {
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) os << ' ';
    os << fixed(f.px(xs[k])) << ',' << fixed(f.py(ys[static_cast<Eigen::Index>(k)]));
  }
  os << "\"/>\n";
}

}  // namespace

void render_fanchart(std::ostream& os, const FanChartTable& table) {
  if (table.q_grid.empty()) throw ConfigError("render_fanchart: empty q grid");
  const Frame f{1.0};
  open_svg(os, f, "q", "P(p* &lt;= q)");
  os << "<g id=\"paths\">\n";
  for (Eigen::Index p = 0; p < table.n_paths(); ++p) {
    polyline(os, f, table.q_grid, table.per_path_cdf.row(p),
             "stroke=\"steelblue\" stroke-opacity=\"0.25\" stroke-width=\"0.8\"");
  }
  os << "</g>\n";
  polyline(os, f, table.q_grid, table.unconditional_cdf,
           "stroke=\"black\" stroke-width=\"2\"");
  const std::vector<double> diagonal{0.0, 1.0};
  polyline(os, f, diagonal, Eigen::Vector2d(0.0, 1.0),
           "stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
  os << "</svg>\n";
}

void render_power(std::ostream& os, const PowerTable& table) {
  if (table.c_grid.empty()) throw ConfigError("render_power: empty c grid");
  const double x_max = table.c_grid.back() > 0.0 ? table.c_grid.back() : 1.0;
  const Frame f{x_max};
  open_svg(os, f, "c", "rejection rate");
  os << "<g id=\"paths\">\n";
  for (Eigen::Index p = 0; p < table.n_paths(); ++p) {
    polyline(os, f, table.c_grid, table.per_path_rejection.row(p),
             "stroke=\"steelblue\" stroke-opacity=\"0.35\" stroke-width=\"0.8\"");
  }
  os << "</g>\n";
  const Eigen::RowVectorXd mean = table.per_path_rejection.colwise().mean();
  polyline(os, f, table.c_grid, mean, "stroke=\"black\" stroke-width=\"2\"");
  const std::vector<double> level_x{0.0, x_max};
  polyline(os, f, level_x, Eigen::Vector2d(table.alpha, table.alpha),
           "stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
  os << "</svg>\n";
}

}  // namespace volboot::io
