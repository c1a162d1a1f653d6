#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "volboot/errors.hpp"
#include "volboot/io.hpp"

using namespace volboot;

namespace {

FanChartTable random_fanchart(Eigen::Index paths) {
  FanChartTable t;
  t.q_grid = ExperimentConfig::default_q_grid();
  const Eigen::Index nq = static_cast<Eigen::Index>(t.q_grid.size());
  t.per_path_cdf.resize(paths, nq);
  Xoshiro256pp engine(SeedPath(1));
  for (Eigen::Index p = 0; p < paths; ++p) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < nq; ++k) {
      acc = std::min(1.0, acc + engine.uniform01() / 40.0);
      t.per_path_cdf(p, k) = acc;
    }
  }
  t.unconditional_cdf = t.per_path_cdf.colwise().mean();
  return t;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 0.0, -2.5e-300, 1e22, 0.05}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.05), "0.05");
}

TEST(FanChartCsv, RoundTripIsExact) {
  const auto table = random_fanchart(7);
  std::stringstream ss;
  io::write_fanchart_csv(ss, table);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 15), "path_id,q,ecdf\n");
  EXPECT_EQ(count(text, "\nmean,"), table.q_grid.size());
  const auto back = io::read_fanchart_csv(ss);
  EXPECT_EQ(back.q_grid, table.q_grid);
  EXPECT_TRUE(back.per_path_cdf == table.per_path_cdf);
  EXPECT_TRUE(back.unconditional_cdf == table.unconditional_cdf);
}

TEST(FanChartCsv, RejectsWrongHeader) {
  std::stringstream ss("path,q,value\n0,0.5,0.5\n");
  EXPECT_THROW(io::read_fanchart_csv(ss), ConfigError);
}

TEST(PowerCsv, RoundTripIsExact) {
  PowerTable table;
  table.c_grid = {0.0, 0.5, 1.0, 7.25};
  table.per_path_rejection = Eigen::MatrixXd::Random(5, 4).cwiseAbs();
  std::stringstream ss;
  io::write_power_csv(ss, table);
  EXPECT_EQ(ss.str().substr(0, 25), "path_id,c,rejection_rate\n");
  const auto back = io::read_power_csv(ss);
  EXPECT_EQ(back.c_grid, table.c_grid);
  EXPECT_TRUE(back.per_path_rejection == table.per_path_rejection);
}

TEST(OracleCsv, Columns) {
  std::stringstream ss;
  io::write_functionals_csv(ss, {1.5, 2.0}, {0.25, -1.0});
  EXPECT_EQ(ss.str(), "replicate,v1,m1\n0,1.5,0.25\n1,2,-1\n");
}

TEST(FanChartSvg, OnePolylinePerPathPlusReferences) {
  const auto table = random_fanchart(100);
  std::ostringstream os;
  io::render_fanchart(os, table);
  const std::string svg = os.str();
  EXPECT_EQ(count(svg, "<polyline"), 102u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 1u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(FanChartSvg, AxesSpanUnitSquare) {
  const auto table = random_fanchart(3);
  std::ostringstream os;
  io::render_fanchart(os, table);
  const std::string svg = os.str();
  // the dashed diagonal runs from (0,0) to (1,1) in plot coordinates: the
  // corners of the axis box
  const std::regex diag("stroke-dasharray=\"6,4\" points=\"([0-9.]+),([0-9.]+) ([0-9.]+),([0-9.]+)\"");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, diag));
  const std::regex xaxis("<line x1=\"([0-9.]+)\" y1=\"([0-9.]+)\" x2=\"([0-9.]+)\" y2=\"([0-9.]+)\"/>");
  std::smatch a;
  ASSERT_TRUE(std::regex_search(svg, a, xaxis));
  EXPECT_EQ(m[1], a[1]);
  EXPECT_EQ(m[2], a[2]);
  EXPECT_EQ(m[3], a[3]);
  EXPECT_NE(svg.find(">0</text>"), std::string::npos);
  EXPECT_NE(svg.find(">1</text>"), std::string::npos);
}

TEST(FanChartSvg, EmptyGridRejected) {
  FanChartTable table;
  std::ostringstream os;
  EXPECT_THROW(io::render_fanchart(os, table), ConfigError);
}

TEST(PowerSvg, Structure) {
  PowerTable table;
  table.c_grid = {0.0, 4.0, 8.0};
  table.per_path_rejection = Eigen::MatrixXd::Constant(10, 3, 0.5);
  std::ostringstream os;
  io::render_power(os, table);
  EXPECT_EQ(count(os.str(), "<polyline"), 12u);
  PowerTable empty;
  EXPECT_THROW(io::render_power(os, empty), ConfigError);
}
