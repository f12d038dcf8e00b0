#include "dmgsp/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmgsp/error.hpp"

namespace dmgsp {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::file_not_found, "cannot open file: " + path);

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_fields(t);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(errc::parse_error,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(table.header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty())
    fail(errc::parse_error, path + ": missing header line");
  return table;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& path,
                    std::size_t line_no) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(errc::parse_error, path + ":" + std::to_string(line_no) +
                                ": not a number: '" + field + "'");
  }
  return value;
}

PointSet load_coords_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() != 3)
    fail(errc::parse_error, path + ": expected 3 columns (id,lat,lon or id,x,y)");

  std::string c1 = lower(table.header[1]);
  std::string c2 = lower(table.header[2]);
  PointSet ps;
  if (c1 == "lat" && c2 == "lon") {
    ps.geographic = true;
  } else if (c1 == "x" && c2 == "y") {
    ps.geographic = false;
  } else {
    fail(errc::parse_error,
         path + ": unrecognized coordinate header '" + table.header[1] + "," +
             table.header[2] + "'");
  }

  ps.xy.resize(static_cast<Eigen::Index>(table.rows.size()), 2);
  std::size_t line_no = 1;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ++line_no;
    ps.ids.push_back(table.rows[r][0]);
    ps.xy(static_cast<Eigen::Index>(r), 0) =
        parse_double(table.rows[r][1], path, line_no);
    ps.xy(static_cast<Eigen::Index>(r), 1) =
        parse_double(table.rows[r][2], path, line_no);
  }
  return ps;
}

SignalTable load_signals_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 2)
    fail(errc::parse_error, path + ": expected timestamp plus station columns");

  SignalTable st;
  st.stations.assign(table.header.begin() + 1, table.header.end());
  const auto n_rows = static_cast<Eigen::Index>(table.rows.size());
  const auto n_cols = static_cast<Eigen::Index>(st.stations.size());
  st.values.resize(n_rows, n_cols);
  std::size_t line_no = 1;
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    ++line_no;
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    st.timestamps.push_back(row[0]);
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const std::string& field = row[static_cast<std::size_t>(c) + 1];
      st.values(r, c) = field.empty()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : parse_double(field, path, line_no);
    }
  }
  return st;
}

DataTable load_data_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 2)
    fail(errc::parse_error, path + ": expected id plus feature columns");

  DataTable dt;
  const auto n_rows = static_cast<Eigen::Index>(table.rows.size());
  const auto n_cols = static_cast<Eigen::Index>(table.header.size()) - 1;
  dt.features.resize(n_rows, n_cols);
  std::size_t line_no = 1;
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    ++line_no;
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    dt.ids.push_back(row[0]);
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      dt.features(r, c) =
          parse_double(row[static_cast<std::size_t>(c) + 1], path, line_no);
    }
  }
  return dt;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write file: " + path);
  out << contents;
  if (!out) fail(errc::io_error, "write failed: " + path);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dmgsp
