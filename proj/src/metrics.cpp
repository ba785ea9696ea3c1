#include "zovr/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace zovr {

MetricsRow compute_metrics(const RunState& state, const ObjectiveSpec& spec, std::uint64_t m) {
  const auto n = static_cast<double>(state.x.rows());
  const Vector xbar = row_mean(state.x);
  const Vector grad = global_grad(spec, xbar);

  MetricsRow row;
  row.k = state.k;
  row.m = m;
  row.stat_gap = grad.squaredNorm();
  row.consensus_err = (state.x.rowwise() - xbar.transpose()).squaredNorm() / n;
  if (tracks_gradient(state.algorithm))
    row.tracking_err = (state.s.rowwise() - grad.transpose()).squaredNorm() / n;
  return row;
}

std::string format_csv_row(const MetricsRow& row) {
  char buf[160];
  int len = std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,", row.k,
                          static_cast<unsigned long long>(row.m), row.stat_gap, row.consensus_err);
  std::string line(buf, static_cast<std::size_t>(len));
  if (row.tracking_err) {
    len = std::snprintf(buf, sizeof buf, "%.17g", *row.tracking_err);
    line.append(buf, static_cast<std::size_t>(len));
  }
  return line;
}

void write_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << format_csv_row(row) << '\n';
}

}  // namespace zovr
