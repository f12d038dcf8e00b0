#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace dmgsp {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a comma-separated file with a header line. Lines starting with '#'
// are skipped. Throws file_not_found / parse_error (message carries the
// 1-based line number of the offending row).
CsvTable read_csv(const std::string& path);

// Deterministic number formatting for emitted files: shortest round-trip
// style via %.12g, NaN rendered as the empty string.
std::string format_double(double v);

double parse_double(const std::string& field, const std::string& path,
                    std::size_t line_no);

// Point cloud with string ids, either planar (id,x,y) or geographic
// (id,lat,lon). `geographic` records which header was seen.
struct PointSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd xy;  // n x 2, (x,y) or (lat,lon)
  bool geographic = false;
};

PointSet load_coords_csv(const std::string& path);

// Signals file: header `timestamp,<station>,...`; one row per time step;
// missing values are empty fields and come back as NaN.
struct SignalTable {
  std::vector<std::string> timestamps;
  std::vector<std::string> stations;
  Eigen::MatrixXd values;  // rows = time steps, cols = stations
};

SignalTable load_signals_csv(const std::string& path);

// Generic numeric table with an id column: header `id,<feature>...`.
struct DataTable {
  std::vector<std::string> ids;
  Eigen::MatrixXd features;  // n x k
};

DataTable load_data_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

// FNV-1a over the given string; used for config fingerprints in metadata.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace dmgsp
