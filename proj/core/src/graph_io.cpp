#include "dmgsp/graph_io.hpp"

#include <algorithm>

#include "dmgsp/csv.hpp"

namespace dmgsp {

Graph load_edge_list_csv(const std::string& path, Eigen::Index n) {
  CsvTable table = read_csv(path);
  if (table.header.size() != 3)
    fail(errc::parse_error, path + ": expected columns i,j,weight");

  struct Edge {
    Eigen::Index i, j;
    double w;
  };
  std::vector<Edge> edges;
  Eigen::Index max_id = -1;
  std::size_t line_no = 1;
  for (const auto& row : table.rows) {
    ++line_no;
    const auto i = static_cast<Eigen::Index>(parse_double(row[0], path, line_no));
    const auto j = static_cast<Eigen::Index>(parse_double(row[1], path, line_no));
    const double w = parse_double(row[2], path, line_no);
    if (i < 0 || j < 0)
      fail(errc::parse_error,
           path + ":" + std::to_string(line_no) + ": negative node id");
    max_id = std::max({max_id, i, j});
    edges.push_back({i, j, w});
  }
  const Eigen::Index size = std::max(n, max_id + 1);
  if (size < 2) fail(errc::too_small, path + ": fewer than 2 nodes");

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
  for (const auto& e : edges) w(e.i, e.j) = w(e.j, e.i) = e.w;
  return build_graph(std::move(w));
}

}  // namespace dmgsp
