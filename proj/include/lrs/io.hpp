#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"
#include "lrs/network.hpp"
#include "lrs/optimizer.hpp"

namespace lrs {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- CSV matrices -----------------------------------------------------------

/// Symmetrized matrix plus what the raw file looked like.
struct LoadedMatrix {
  SymMatrix matrix;
  double max_asymmetry = 0.0;  // ||A - A^T||_inf of the raw input
  int dim = 0;
};

/// One row per line, comma-separated decimals, no header. The reader
/// symmetrizes via (A + A^T)/2 and records the largest asymmetry.
inline LoadedMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    int col = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      ++col;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw InputError("cannot parse '" + cell + "' at row " + std::to_string(lineno) +
                         ", column " + std::to_string(col) + " of '" + path + "'");
      if (!std::isfinite(v))
        throw InputError("non-finite entry at row " + std::to_string(lineno) + ", column " +
                         std::to_string(col) + " of '" + path + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("row " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("'" + path + "' contains no data");
  if (rows.size() != rows.front().size())
    throw InputError("matrix in '" + path + "' is not square (" + std::to_string(rows.size()) +
                     " rows, " + std::to_string(rows.front().size()) + " columns)");

  const int n = static_cast<int>(rows.size());
  DenseMatrix raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = rows[i][j];

  LoadedMatrix lm;
  lm.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      lm.max_asymmetry = std::max(lm.max_asymmetry, std::fabs(raw(i, j) - raw(j, i)));
  lm.matrix = SymMatrix::symmetrized(raw);
  return lm;
}

inline void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_csv(const std::string& path, const SymMatrix& m) {
  write_matrix_csv(path, m.to_dense());
}

// ---- trace export -----------------------------------------------------------

inline void write_trace_csv(const std::string& path, const OptTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "j,phi,grad_norm,step,running_max_norm\n";
  for (const auto& r : trace.records)
    out << r.iter << ',' << format_double(r.phi) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.step) << ',' << format_double(r.running_max_param_norm) << '\n';
}

inline OptTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  OptTrace trace;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() != 5)
      throw InputError("trace row " + std::to_string(lineno) + " has " +
                       std::to_string(vals.size()) + " fields, expected 5");
    trace.records.push_back(
        {static_cast<long>(vals[0]), vals[1], vals[2], vals[3], vals[4]});
  }
  if (trace.records.empty()) throw InputError("trace '" + path + "' contains no records");
  return trace;
}

// ---- PGM heatmaps -----------------------------------------------------------

/// 8-bit binary PGM. Values are clipped to [lo, hi] and mapped linearly:
/// gray = round(255 * (clip(v) - lo) / (hi - lo)).
inline void write_pgm(const std::string& path, const SymMatrix& m, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("write_pgm: need hi > lo");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  const int n = m.dim();
  out << "P5\n" << n << ' ' << n << "\n255\n";
  std::vector<unsigned char> row(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = std::min(hi, std::max(lo, m(i, j)));
      row[j] = static_cast<unsigned char>(std::lround(255.0 * (v - lo) / (hi - lo)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), n);
  }
}

// ---- NetParams serialization -------------------------------------------------

/// Versioned JSON blob: architecture header plus the flat coefficient list
/// in layer order (A^(0) row-major, b^(0), A^(1), ...). nlohmann/json
/// prints doubles shortest-round-trip, so the round trip is exact.
inline nlohmann::json params_to_json(const Architecture& arch, const NetParams& p) {
  check_shapes(arch, p);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["arch"] = {{"n", arch.n},
               {"k", arch.k},
               {"hidden", arch.hidden},
               {"activation", to_string(arch.activation)}};
  j["params"] = flatten_params(p);
  return j;
}

inline std::pair<Architecture, NetParams> params_from_json(const nlohmann::json& j) {
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
    throw InputError("params blob: unsupported or missing schema_version");
  const auto& a = j.at("arch");
  Architecture arch;
  arch.n = a.at("n").get<int>();
  arch.k = a.at("k").get<int>();
  arch.hidden = a.at("hidden").get<std::vector<int>>();
  arch.activation = parse_activation(a.at("activation").get<std::string>());
  arch.validate();
  const auto flat = j.at("params").get<std::vector<double>>();
  if (flat.size() != static_cast<std::size_t>(arch.param_count()))
    throw InputError("params blob: expected " + std::to_string(arch.param_count()) +
                     " coefficients, got " + std::to_string(flat.size()));
  return {arch, unflatten_params(arch, flat)};
}

inline void save_params(const std::string& path, const Architecture& arch, const NetParams& p) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << params_to_json(arch, p).dump();
}

inline std::pair<Architecture, NetParams> load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return params_from_json(j);
}

}  // namespace lrs
