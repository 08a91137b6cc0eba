#pragma once
// Numeric CSV tables with '#' metadata lines:
//
//   # key=value, key=value
//   col_a,col_b
//   1.5,2
//
// Numbers are written with %.17g so that a read-back reproduces every double.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iwv/errors.hpp"
#include "iwv/signal_chain.hpp"
#include "iwv/spectral.hpp"

namespace iwv::csv {

struct Table {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DomainError("csv: no column named '" + name + "'");
  }
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write(std::ostream& os, const Table& t) {
  for (const auto& c : t.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw DomainError("csv: row width differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    auto cells = split(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw DomainError("csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size())
        throw DomainError("csv: line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw DomainError("csv: missing header line");
  return t;
}

inline void write_file(const std::string& path, const Table& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + path + "' for writing");
  write(f, t);
}

inline Table read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + path + "'");
  return read(f);
}

/// `time_s,tilt_rad` with fs, seed and provenance in the metadata block.
inline Table to_table(const TimeSeries& ts, const std::vector<std::string>& extra = {}) {
  Table t;
  t.comments.push_back("fs_hz=" + format_number(ts.sample_rate));
  t.comments.push_back("seed=" + (ts.seed ? std::to_string(*ts.seed) : std::string("none")));
  t.comments.push_back("unit=" + ts.unit);
  if (!ts.provenance.empty()) t.comments.push_back("provenance=" + ts.provenance);
  t.comments.insert(t.comments.end(), extra.begin(), extra.end());
  t.header = {"time_s", "tilt_rad"};
  t.rows.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) t.rows.push_back({ts.time(i), ts.samples[i]});
  return t;
}

/// `freq_hz,tilt_asd_rad_rthz,phase_asd_rad_rthz`.
inline Table to_table(const SpectrumEstimate& tilt, const SpectrumEstimate& phase,
                      const std::vector<std::string>& extra = {}) {
  if (tilt.size() != phase.size()) throw DomainError("tilt and phase spectra differ in length");
  Table t;
  t.comments.push_back("window=" + to_string(tilt.window) + ", w=" + std::to_string(tilt.smoothing) +
                       ", segments=" + std::to_string(tilt.segments));
  t.comments.push_back("resolution_hz=" + format_number(tilt.resolution) + ", fs_hz=" + format_number(tilt.sample_rate));
  t.comments.insert(t.comments.end(), extra.begin(), extra.end());
  t.header = {"freq_hz", "tilt_asd_rad_rthz", "phase_asd_rad_rthz"};
  t.rows.reserve(tilt.size());
  for (std::size_t i = 0; i < tilt.size(); ++i) t.rows.push_back({tilt.frequency[i], tilt.asd[i], phase.asd[i]});
  return t;
}

}  // namespace iwv::csv
