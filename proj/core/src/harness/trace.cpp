#include "pldo/harness/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>

namespace pldo::harness {

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v)
{
  return v ? format_double(*v) : std::string();
}

TraceRow failure_row(int run_id, std::uint64_t seed, std::int64_t k, std::int64_t comm_rounds)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  TraceRow r;
  r.run_id = run_id;
  r.seed = seed;
  r.point.k = k;
  r.point.comm_rounds = comm_rounds;
  r.point.f_gap = nan;
  r.point.consensus_err_x = nan;
  r.point.grad_norm_x = nan;
  return r;
}

void write_trace(std::ostream& out, std::vector<TraceRow> rows)
{
  std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return a.run_id != b.run_id ? a.run_id < b.run_id : a.point.k < b.point.k;
  });
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    const auto& p = r.point;
    out << r.run_id << ',' << r.seed << ',' << p.k << ',' << p.comm_rounds << ',' << format_double(p.f_gap) << ','
        << format_double(p.consensus_err_x) << ',' << format_optional(p.consensus_err_y) << ','
        << format_double(p.grad_norm_x) << ',' << format_optional(p.grad_norm_y) << ',' << format_optional(r.bound)
        << ',' << format_optional(p.wall_time_s) << '\n';
  }
}

TraceTable read_csv(std::istream& in)
{
  TraceTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

}  // namespace pldo::harness
