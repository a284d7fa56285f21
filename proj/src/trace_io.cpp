#include "moprox/trace_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "moprox/errors.hpp"
#include "moprox/numfmt.hpp"

namespace moprox {

namespace {

std::string join_vec(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += repr17(v[i]);
  }
  return s;
}

Vec split_vec(const std::string& cell) {
  Vec v;
  if (cell.empty()) return v;
  std::size_t start = 0;
  for (;;) {
    std::size_t semi = cell.find(';', start);
    std::string part = cell.substr(start, semi == std::string::npos ? semi : semi - start);
    bool ok = false;
    double d = parse_double(part, &ok);
    if (!ok) throw ValidationError("trace csv: malformed number '" + part + "'");
    v.push_back(d);
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return v;
}

std::string scalar_cell(double v) { return std::isnan(v) ? "" : repr17(v); }

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& t) {
  out << "k,x,F,lambda,e,z,step_norm,inner_iters,stationarity,criticality_residual\n";
  for (const IterateRecord& r : t.records) {
    out << r.k << ',' << join_vec(r.x) << ',' << join_vec(r.F_of_x) << ','
        << scalar_cell(r.lambda_k) << ',' << join_vec(r.e_k) << ',' << join_vec(r.z_k) << ','
        << scalar_cell(r.step_norm) << ','
        << (r.inner_iterations < 0 ? std::string() : std::to_string(r.inner_iterations)) << ','
        << scalar_cell(r.stationarity) << ',' << scalar_cell(r.criticality_residual) << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const Trace& t) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write trace file '" + path + "'");
    write_trace_csv(out, t);
    if (!out.good()) throw ValidationError("short write to trace file '" + path + "'");
  }
  fs::rename(tmp, target);
}

std::vector<IterateRecord> read_trace_csv(std::istream& in) {
  std::vector<IterateRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace csv: empty input");
  if (line.rfind("k,x,F,lambda", 0) != 0)
    throw ValidationError("trace csv: unexpected header '" + line + "'");
  const double nan = std::nan("");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 10) throw ValidationError("trace csv: expected 10 columns");
    IterateRecord r;
    r.k = std::stoi(cells[0]);
    r.x = split_vec(cells[1]);
    r.F_of_x = split_vec(cells[2]);
    r.lambda_k = cells[3].empty() ? nan : parse_double(cells[3]);
    r.e_k = split_vec(cells[4]);
    r.z_k = split_vec(cells[5]);
    r.step_norm = cells[6].empty() ? nan : parse_double(cells[6]);
    r.inner_iterations = cells[7].empty() ? -1 : std::stoi(cells[7]);
    r.stationarity = cells[8].empty() ? nan : parse_double(cells[8]);
    r.criticality_residual = cells[9].empty() ? nan : parse_double(cells[9]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace moprox
