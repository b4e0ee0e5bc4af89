#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pldo/algorithms.hpp"

namespace pldo::harness {

inline constexpr const char* kTraceHeader =
    "run_id,seed,k,comm_rounds,f_gap,consensus_err_x,consensus_err_y,grad_norm_x,grad_norm_y,bound_f_gap,wall_time_s";

inline constexpr const char* kSweepHeader =
    "axis,value,run_id,seed,status,final_k,final_f_gap,final_consensus_err_x,final_consensus_err_y,"
    "total_comm_rounds,wall_time_s";

/// %.17g, so values round-trip exactly. NaN/inf are written as nan/inf.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

struct TraceRow {
  int run_id = 0;
  std::uint64_t seed = 0;
  TracePoint point;
  std::optional<double> bound;
};

/// Marks a run that aborted at iteration k: measurement cells are nan.
TraceRow failure_row(int run_id, std::uint64_t seed, std::int64_t k, std::int64_t comm_rounds);

/// Header plus rows sorted by (run_id, k); sorting is stable.
void write_trace(std::ostream& out, std::vector<TraceRow> rows);

struct TraceTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Minimal CSV reader for files written by this module (no quoting).
TraceTable read_csv(std::istream& in);

}  // namespace pldo::harness
