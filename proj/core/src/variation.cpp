#include "dmgsp/variation.hpp"

#include <cmath>

namespace dmgsp {

double total_variation(const Eigen::MatrixXd& lap, const Eigen::VectorXd& x) {
  if (lap.rows() != x.size()) fail(errc::bad_params, "dimension mismatch");
  return x.dot(lap * x);
}

double total_variation_edges(const Graph& g, const Eigen::VectorXd& x) {
  const Eigen::Index n = g.size();
  if (x.size() != n) fail(errc::bad_params, "dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double diff = x(i) - x(j);
      acc += g.weights()(i, j) * diff * diff;
    }
  return acc;  // 1/2 sum over ordered pairs = sum over unordered pairs
}

double markov_variation(const TransitionMatrix& p, const Eigen::VectorXd& x,
                        VariationNorm norm) {
  if (p.size() != x.size()) fail(errc::bad_params, "dimension mismatch");
  Eigen::VectorXd r = x - p.p * x;
  return norm == VariationNorm::L1 ? r.lpNorm<1>() : r.norm();
}

double markov_variation_l1_expanded(const Graph& g, const Eigen::VectorXd& x) {
  const Eigen::Index n = g.size();
  if (x.size() != n) fail(errc::bad_params, "dimension mismatch");
  const Eigen::VectorXd d = g.degrees();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) <= 0.0)
      fail(errc::isolated_node, "zero degree at node " + std::to_string(i));
    double inner = 0.0;
    for (Eigen::Index m = 0; m < n; ++m)
      inner += g.weights()(i, m) * (x(i) - x(m));
    acc += std::abs(inner) / d(i);
  }
  return acc;
}

bool smoothness_test(const TransitionMatrix& p, const Eigen::VectorXd& x,
                     double f_n) {
  if (f_n <= 0.0) fail(errc::bad_params, "threshold must be positive");
  return markov_variation(p, x, VariationNorm::L1) < f_n;
}

double second_difference_bound(const Eigen::MatrixXd& lap,
                               const Eigen::VectorXd& x) {
  return (lap * x).cwiseAbs().maxCoeff();
}

VariationReport tv_mv_gap_diagnostic(const SpectralDecomposition& dec,
                                     const Eigen::MatrixXd& lap,
                                     const TransitionMatrix& p,
                                     const Eigen::VectorXd& x, double c) {
  const Eigen::Index n = dec.size();
  if (x.size() != n || lap.rows() != n || p.size() != n)
    fail(errc::bad_params, "dimension mismatch");
  // eigenvalue 1 with multiplicity > 1 means a disconnected graph
  if (dec.eigenvalues(1) >= 1.0 - 1e-10)
    fail(errc::not_connected, "graph is not connected");

  VariationReport report;
  report.tv = total_variation(lap, x);
  report.mv_l1 = markov_variation(p, x, VariationNorm::L1);
  report.mv_l2 = markov_variation(p, x, VariationNorm::L2);
  report.gap = std::abs(report.tv - report.mv_l1);

  // Euclidean projection onto the span of the leading nontrivial coordinate
  const Eigen::VectorXd psi1 = dec.right_vectors.col(1);
  const Eigen::VectorXd proj = (psi1.dot(x) / psi1.squaredNorm()) * psi1;
  report.projection_residual = (x - proj).norm();

  // lambda_2 in the decomposition's own (magnitude-descending) indexing
  const double lambda2 = std::abs(dec.eigenvalues(std::min<Eigen::Index>(2, n - 1)));
  report.bound = std::sqrt(std::max(0.0, c)) * std::sqrt(lambda2) *
                 report.projection_residual;
  report.holds = report.gap <= report.bound;
  return report;
}

}  // namespace dmgsp
