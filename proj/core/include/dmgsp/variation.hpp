#pragma once

#include <Eigen/Core>

#include "dmgsp/diffusion.hpp"
#include "dmgsp/graph.hpp"

namespace dmgsp {

enum class VariationNorm { L1, L2 };

/// x^T L x.
double total_variation(const Eigen::MatrixXd& lap, const Eigen::VectorXd& x);

/// 1/2 sum_ij w_ij (x_i - x_j)^2; equals the quadratic form.
double total_variation_edges(const Graph& g, const Eigen::VectorXd& x);

/// ||x - Px|| in the requested norm.
double markov_variation(const TransitionMatrix& p, const Eigen::VectorXd& x,
                        VariationNorm norm = VariationNorm::L1);

/// The expanded l1 form sum_i (1/d_i) |sum_m W_im (x_i - x_m)|.
double markov_variation_l1_expanded(const Graph& g, const Eigen::VectorXd& x);

/// ||x - Px||_1 < f_N.
bool smoothness_test(const TransitionMatrix& p, const Eigen::VectorXd& x,
                     double f_n);

/// max_i |(Lx)_i|, the operational stand-in for the "second derivative
/// bounded by C" assumption.
double second_difference_bound(const Eigen::MatrixXd& lap,
                               const Eigen::VectorXd& x);

struct VariationReport {
  double tv = 0.0;
  double mv_l1 = 0.0;
  double mv_l2 = 0.0;
  double gap = 0.0;           // |tv - mv_l1|
  double bound = 0.0;         // sqrt(C) * sqrt(lambda_2) * ||x - proj(x)||
  double projection_residual = 0.0;  // ||x - proj_{psi_1}(x)||
  bool holds = false;         // gap <= bound
};

/// Evaluates both sides of the gap inequality. The projection is the
/// Euclidean projection of x onto the span of the leading nontrivial
/// diffusion coordinate. Violations are recorded, not raised.
VariationReport tv_mv_gap_diagnostic(const SpectralDecomposition& dec,
                                     const Eigen::MatrixXd& lap,
                                     const TransitionMatrix& p,
                                     const Eigen::VectorXd& x, double c);

}  // namespace dmgsp
