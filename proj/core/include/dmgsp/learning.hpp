#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dmgsp/graph.hpp"
#include "dmgsp/gso.hpp"

namespace dmgsp {

struct SampleCovariance {
  Eigen::MatrixXd sigma;
  Eigen::Index observations = 0;
};

struct LearnOptions {
  int max_iters = 2000;
  double tol = 1e-8;        // stop when the objective change drops below this
  double step = 1e-2;       // initial step, halved on non-decrease
  int projection_iters = 50;  // Sinkhorn/clip sweeps per projection
  double tv_alpha = 1e-2;   // sparsity weight for the total-variation solver

  void validate() const;
};

enum class LearnStatus { Converged, MaxIters, NoProgress };

struct LearnResult {
  Eigen::MatrixXd w_est;  // symmetric, nonnegative up to -1e-10
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  LearnStatus status = LearnStatus::MaxIters;
  double constraint_violation = 0.0;         // after final symmetrization
  double constraint_violation_presym = 0.0;  // at the last accepted iterate
};

/// Mean-centered covariance with 1/(m-1) normalization, symmetrized.
SampleCovariance sample_covariance(const Eigen::MatrixXd& signals);

/// Eigendecomposes sigma = Q Lambda Q^T and returns Q h(Lambda) Q^T. The
/// filter acts on the covariance's own spectrum; the shift operator only
/// supplies the filter family and parameters.
SampleCovariance prefilter_covariance(const SampleCovariance& cov,
                                      const ShiftOperator& basis_source,
                                      const FilterSpec& f);

/// Objective ||sigma - D(W)^+ W sigma W^T||_F^2 over the nonnegative
/// doubly stochastic set, by projected gradient with Sinkhorn-style
/// projection. The returned estimate is symmetrized.
LearnResult min_markov_var(const SampleCovariance& cov,
                           const LearnOptions& opts = {});

/// Objective value and its analytic gradient, exposed so the gradient can
/// be checked against finite differences.
double markov_var_objective(const Eigen::MatrixXd& sigma,
                            const Eigen::MatrixXd& w);
Eigen::MatrixXd markov_var_gradient(const Eigen::MatrixXd& sigma,
                                    const Eigen::MatrixXd& w);

/// Projection onto {W >= 0, W 1 = 1, 1^T W = 1} by alternating clipping
/// and Sinkhorn scaling.
Eigen::MatrixXd project_doubly_stochastic(Eigen::MatrixXd w, int sweeps = 50);

/// tr(sigma L) - log det(L + J) + alpha ||offdiag(L)||_1 over combinatorial
/// Laplacians, J = (1/n) 1 1^T. Returns the weight matrix W = -offdiag(L).
LearnResult min_total_var(const SampleCovariance& cov, double alpha,
                          const LearnOptions& opts = {});

enum class LearnMethod { MV, TV };

struct GsoSpec {
  GsoKind kind = GsoKind::Markov;
  DmParams dm;
};

/// GFT each signal in the chosen operator's basis, apply the filter,
/// return to the vertex domain, then run the chosen optimizer on the
/// sample covariance. Identity filters bypass the transform so the
/// degenerate pipeline is bit-equal to the plain optimizer.
LearnResult learn_pipeline(const Eigen::MatrixXd& signals, const Graph& g_hint,
                           const GsoSpec& gso, const FilterSpec& f,
                           LearnMethod method, const LearnOptions& opts = {});

/// Filtered copies of the signals (rows) in the operator's spectral domain.
Eigen::MatrixXd filter_signals(const Eigen::MatrixXd& signals,
                               const ShiftOperator& s, const FilterSpec& f);

/// Edge-list export `i,j,weight` (full upper triangle) plus a JSON sidecar
/// with the objective trace, iteration count and constraint violation.
void write_learn_result(const std::string& csv_path,
                        const std::string& sidecar_path,
                        const LearnResult& result);

}  // namespace dmgsp
