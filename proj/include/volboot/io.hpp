#pragma once

#include <iosfwd>
#include <string>

#include "volboot/limitoracle.hpp"
#include "volboot/montecarlo.hpp"

namespace volboot::io {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

// Fan chart CSV: header "path_id,q,ecdf"; one row per (path, q) in path-major
// order, followed by the unconditional rows with path_id "mean".
void write_fanchart_csv(std::ostream& os, const FanChartTable& table);
FanChartTable read_fanchart_csv(std::istream& is);

// Power CSV: header "path_id,c,rejection_rate"; path-major rows.
void write_power_csv(std::ostream& os, const PowerTable& table);
PowerTable read_power_csv(std::istream& is);

// Oracle CSVs: "replicate,v1,m1" per source, and a one-row summary.
void write_functionals_csv(std::ostream& os, const std::vector<double>& v1,
                           const std::vector<double>& m1);
void write_oracle_summary_csv(std::ostream& os, const OracleConfig& config,
                              const OracleComparison& result);

// SVG charts. Size charts: one translucent polyline per path, the
// unconditional cdf solid, the U(0,1) cdf dashed, axes [0,1]x[0,1].
void render_fanchart(std::ostream& os, const FanChartTable& table);
// Power charts: per-path rejection rate against c plus the cross-path mean.
void render_power(std::ostream& os, const PowerTable& table);

}  // namespace volboot::io
