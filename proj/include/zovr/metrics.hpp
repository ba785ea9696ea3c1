#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include "zovr/algorithms.hpp"
#include "zovr/oracle.hpp"

namespace zovr {

struct MetricsRow {
  std::size_t k = 0;
  std::uint64_t m = 0;  // cumulative fresh queries over all agents
  double stat_gap = 0.0;
  double consensus_err = 0.0;
  std::optional<double> tracking_err;  // tracking algorithms only

  bool operator==(const MetricsRow&) const = default;
};

// stat_gap = |grad f(xbar)|^2, consensus_err = (1/N) sum |x_i - xbar|^2,
// tracking_err = (1/N) sum |s_i - grad f(xbar)|^2. Uses analytic gradients and
// never touches an oracle.
MetricsRow compute_metrics(const RunState& state, const ObjectiveSpec& spec, std::uint64_t m);

inline constexpr std::string_view kCsvHeader = "k,m,stat_gap,consensus_err,tracking_err";

// Header plus one line per row; 17 significant digits, LF endings.
void write_csv(std::ostream& out, std::span<const MetricsRow> rows);
std::string format_csv_row(const MetricsRow& row);

}  // namespace zovr
