#pragma once

#include <Eigen/Core>

#include "dmgsp/error.hpp"

namespace dmgsp {

enum class ReeMode { Signed, Absolute };

struct MetricOptions {
  Eigen::Index k = 0;        // 0 means use the full spectrum length
  double eig_floor = 1e-9;   // reference eigenvalues below this are skipped
  ReeMode mode = ReeMode::Signed;
};

/// RMSE divided by the reference range max(y) - min(y).
double nrmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

struct ReeResult {
  double value = 0.0;
  Eigen::Index skipped = 0;  // terms dropped by the eig_floor guard
};

/// (1/k) sum_{i=2..k} (est_i - ref_i) / ref_i over magnitude-sorted
/// spectra; the largest eigenvalue is skipped per the formula, and the
/// prefactor stays 1/k even though the sum has k-1 terms.
ReeResult ree(const Eigen::VectorXd& lambda_ref,
              const Eigen::VectorXd& lambda_est,
              const MetricOptions& opts = {});

/// Upper-triangle (i < j) vectorization used when comparing weighted
/// adjacency matrices with nrmse.
Eigen::VectorXd upper_triangle(const Eigen::MatrixXd& m);

}  // namespace dmgsp
