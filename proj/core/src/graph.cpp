#include "dmgsp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dmgsp/rng.hpp"

namespace dmgsp {

Graph::Graph(Eigen::MatrixXd weights, std::optional<Eigen::MatrixXd> coords)
    : weights_(std::move(weights)), coords_(std::move(coords)) {
  const Eigen::Index n = weights_.rows();
  if (weights_.cols() != n)
    fail(errc::too_small, "weight matrix must be square");
  if (n < 2) fail(errc::too_small, "graph needs at least 2 nodes");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0)
      fail(errc::self_loop, "nonzero diagonal at node " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (weights_(i, j) != weights_(j, i))
        fail(errc::not_symmetric, "weights(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") != transpose");
      if (weights_(i, j) < 0.0)
        fail(errc::negative_weight, "negative weight at (" +
                                        std::to_string(i) + "," +
                                        std::to_string(j) + ")");
    }
  }
  if (coords_ && coords_->rows() != n)
    fail(errc::bad_coordinates, "coordinate row count != node count");
}

Graph build_graph(Eigen::MatrixXd weights,
                  std::optional<Eigen::MatrixXd> coords) {
  return Graph(std::move(weights), std::move(coords));
}

Eigen::MatrixXd laplacian(const Graph& g, LaplacianKind kind) {
  const Eigen::VectorXd d = g.degrees();
  Eigen::MatrixXd lap = -g.weights();
  lap.diagonal() += d;
  if (kind == LaplacianKind::Combinatorial) return lap;

  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0)
      fail(errc::isolated_node,
           "normalized Laplacian needs positive degree at node " +
               std::to_string(i));
  }
  Eigen::VectorXd dinv_sqrt = d.array().rsqrt();
  Eigen::MatrixXd norm =
      dinv_sqrt.asDiagonal() * lap * dinv_sqrt.asDiagonal();
  // kill round-off asymmetry so downstream symmetric solvers are exact
  return 0.5 * (norm + norm.transpose());
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double deg = M_PI / 180.0;
  const double dphi = (lat2 - lat1) * deg;
  const double dlambda = (lon2 - lon1) * deg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(lat1 * deg) * std::cos(lat2 * deg) *
                       std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& coords,
                                   DistanceMetric metric) {
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  if (metric == DistanceMetric::GreatCircle) {
    if (coords.cols() != 2)
      fail(errc::bad_coordinates, "great-circle metric needs (lat,lon)");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(coords(i, 0)) > 90.0 || std::abs(coords(i, 1)) > 180.0)
        fail(errc::bad_coordinates,
             "lat/lon out of range at row " + std::to_string(i));
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double d = haversine_km(coords(i, 0), coords(i, 1), coords(j, 0),
                                coords(j, 1));
        dist(i, j) = dist(j, i) = d;
      }
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double d = (coords.row(i) - coords.row(j)).norm();
        dist(i, j) = dist(j, i) = d;
      }
  }
  return dist;
}

Graph radius_graph(const Eigen::MatrixXd& coords, double radius,
                   DistanceMetric metric, double sigma) {
  if (radius <= 0.0) fail(errc::bad_params, "radius must be positive");
  if (sigma <= 0.0) fail(errc::bad_params, "sigma must be positive");
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd dist = pairwise_distances(coords, metric);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (dist(i, j) <= radius) {
        double v = std::exp(-dist(i, j) * dist(i, j) / (2.0 * sigma * sigma));
        w(i, j) = w(j, i) = v;
      }
    }
  return Graph(std::move(w), coords);
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  if (m % 2 == 1) return v[m / 2];
  return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

bool connected(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{0};
  seen[0] = true;
  Eigen::Index count = 1;
  while (!stack.empty()) {
    Eigen::Index u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (w(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace

bool is_connected(const Graph& g) { return connected(g.weights()); }

Graph random_sensor_graph(Eigen::Index n, std::uint64_t seed, int avg_degree) {
  if (n < 2) fail(errc::too_small, "need at least 2 nodes");
  if (avg_degree < 1) fail(errc::bad_params, "avg_degree must be >= 1");

  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    Rng rng(seed, attempt);
    Eigen::MatrixXd coords(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      coords(i, 0) = rng.uniform();
      coords(i, 1) = rng.uniform();
    }

    Eigen::MatrixXd dist = pairwise_distances(coords, DistanceMetric::Euclidean);

    std::vector<double> all_dists;
    all_dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) all_dists.push_back(dist(i, j));
    const double sigma = 0.5 * median_of(all_dists);

    // per-node neighbor ranking by distance (ties by index)
    std::vector<std::vector<Eigen::Index>> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& ord = order[static_cast<std::size_t>(i)];
      ord.resize(static_cast<std::size_t>(n));
      std::iota(ord.begin(), ord.end(), Eigen::Index{0});
      std::sort(ord.begin(), ord.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
        return a < b;
      });
    }

    // grow k until the union of k-nearest-neighbor links hits the target
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index j = order[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (j == i) continue;
        if (w(i, j) == 0.0) {
          double v = std::exp(-dist(i, j) * dist(i, j) / (2.0 * sigma * sigma));
          w(i, j) = w(j, i) = v;
        }
      }
      double edges = 0.5 * (w.array() > 0.0).cast<double>().sum();
      if (2.0 * edges / static_cast<double>(n) >=
          static_cast<double>(avg_degree))
        break;
    }

    if (connected(w)) return Graph(std::move(w), std::move(coords));
  }
  fail(errc::disconnected,
       "could not generate a connected sensor graph in 10 attempts");
}

}  // namespace dmgsp
