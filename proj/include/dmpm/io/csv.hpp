// Energy-record and control-sequence CSV files. Values are printed with 17
// significant digits so that reading a file back reproduces them exactly.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dmpm/core/errors.hpp"
#include "dmpm/integrate/boundary.hpp"
#include "dmpm/integrate/rollout.hpp"

namespace dmpm {

inline constexpr const char* kRecordHeader = "time_s,e_kin_J,e_strain_J,e_total_J,control_m_per_s";
inline constexpr const char* kControlsHeader = "t_start_s,value_m_per_s";

/// Columns of an energy CSV.
struct EnergyTable {
  std::vector<double> time;
  std::vector<double> e_kin;
  std::vector<double> e_strain;
  std::vector<double> e_total;
  std::vector<double> control;

  static EnergyTable From(const RolloutRecord& r) {
    return {r.time, r.e_kin, r.e_strain, r.e_total, r.control};
  }
  std::size_t size() const { return time.size(); }
};

struct ControlsTable {
  std::vector<double> t_start;
  std::vector<double> value;
};

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<double> parse_row(const std::string& line, std::size_t expected,
                                     const std::string& path, std::size_t lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos)
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number '" + cell + "'");
    }
  }
  if (out.size() != expected)
    throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(expected) + " columns");
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

inline void write_energy_csv(std::ostream& os, const EnergyTable& t) {
  os << kRecordHeader << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << detail::fmt17(t.time[i]) << ',' << detail::fmt17(t.e_kin[i]) << ','
       << detail::fmt17(t.e_strain[i]) << ',' << detail::fmt17(t.e_total[i]) << ','
       << detail::fmt17(t.control[i]) << '\n';
  }
}

inline void write_energy_csv(const std::string& path, const EnergyTable& t) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  write_energy_csv(os, t);
}

inline EnergyTable read_energy_csv(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kRecordHeader)
    throw ConfigError(name + ": missing or wrong energy CSV header");
  EnergyTable t;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto v = detail::parse_row(line, 5, name, lineno);
    t.time.push_back(v[0]);
    t.e_kin.push_back(v[1]);
    t.e_strain.push_back(v[2]);
    t.e_total.push_back(v[3]);
    t.control.push_back(v[4]);
  }
  return t;
}

inline EnergyTable read_energy_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return read_energy_csv(is, path);
}

inline void write_controls_csv(std::ostream& os, const ControlSequence& seq) {
  os << kControlsHeader << '\n';
  for (std::size_t k = 0; k < seq.values.size(); ++k) {
    os << detail::fmt17(seq.t_start + static_cast<double>(k) * seq.hold) << ','
       << detail::fmt17(seq.values[k]) << '\n';
  }
}

inline void write_controls_csv(const std::string& path, const ControlSequence& seq) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  write_controls_csv(os, seq);
}

inline ControlsTable read_controls_csv(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kControlsHeader)
    throw ConfigError(name + ": missing or wrong controls CSV header");
  ControlsTable t;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto v = detail::parse_row(line, 2, name, lineno);
    t.t_start.push_back(v[0]);
    t.value.push_back(v[1]);
  }
  return t;
}

inline ControlsTable read_controls_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return read_controls_csv(is, path);
}

}  // namespace dmpm
