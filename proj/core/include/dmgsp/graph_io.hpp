#pragma once

#include <string>

#include "dmgsp/graph.hpp"

namespace dmgsp {

/// Edge-list ingestion: header `i,j,weight`, 0-based node ids. The node
/// count is max(id)+1 unless a larger `n` is given.
Graph load_edge_list_csv(const std::string& path, Eigen::Index n = 0);

}  // namespace dmgsp
