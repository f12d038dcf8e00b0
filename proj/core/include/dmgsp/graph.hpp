#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "dmgsp/error.hpp"

namespace dmgsp {

enum class LaplacianKind { Combinatorial, SymNormalized };
enum class DistanceMetric { Euclidean, GreatCircle };

inline constexpr double kEarthRadiusKm = 6371.0;

/// Undirected weighted graph: symmetric nonnegative weights, zero diagonal,
/// optionally with node coordinates. Immutable after construction.
class Graph {
 public:
  Graph(Eigen::MatrixXd weights,
        std::optional<Eigen::MatrixXd> coords = std::nullopt);

  Eigen::Index size() const { return weights_.rows(); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  bool has_coords() const { return coords_.has_value(); }
  const Eigen::MatrixXd& coords() const { return *coords_; }
  Eigen::VectorXd degrees() const { return weights_.rowwise().sum(); }

 private:
  Eigen::MatrixXd weights_;
  std::optional<Eigen::MatrixXd> coords_;
};

/// Validates and wraps a weight matrix. Throws not_symmetric,
/// negative_weight, self_loop, or too_small.
Graph build_graph(Eigen::MatrixXd weights,
                  std::optional<Eigen::MatrixXd> coords = std::nullopt);

/// D - W, or D^{-1/2} (D - W) D^{-1/2}. The normalized form rejects
/// isolated nodes.
Eigen::MatrixXd laplacian(const Graph& g, LaplacianKind kind);

/// Pairwise distances under the chosen metric (not squared). GreatCircle
/// expects (lat, lon) in degrees and validates their ranges.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& coords,
                                   DistanceMetric metric);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Threshold graph over a point set: edge iff distance <= radius, weighted
/// exp(-d^2 / (2 sigma^2)).
Graph radius_graph(const Eigen::MatrixXd& coords, double radius,
                   DistanceMetric metric, double sigma);

/// Random geometric graph on the unit square. Nodes are wired to nearest
/// neighbors until the average degree target is met; weights use a Gaussian
/// kernel with the median-distance bandwidth. Deterministic per seed;
/// regenerates with a sub-seed (up to 10 tries) if the result is
/// disconnected, then throws disconnected.
Graph random_sensor_graph(Eigen::Index n, std::uint64_t seed,
                          int avg_degree = 6);

/// Single connected component reachable from node 0 covers all nodes.
bool is_connected(const Graph& g);

}  // namespace dmgsp
