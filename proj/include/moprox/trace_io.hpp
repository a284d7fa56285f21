#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "moprox/driver.hpp"

namespace moprox {

/// CSV columns: k,x,F,lambda,e,z,step_norm,inner_iters,stationarity,
/// criticality_residual. Vector cells are semicolon-joined, every number is
/// printed with 17 significant digits (re-parsing reproduces each double
/// exactly). Row 0 carries the initial point with empty step fields.
void write_trace_csv(std::ostream& out, const Trace& t);

/// Writes via a temp file in the same directory, then renames.
void write_trace_csv_file(const std::string& path, const Trace& t);

std::vector<IterateRecord> read_trace_csv(std::istream& in);

}  // namespace moprox
