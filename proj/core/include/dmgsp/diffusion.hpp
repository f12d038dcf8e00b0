#pragma once

#include <Eigen/Core>
#include <string>

#include "dmgsp/graph.hpp"

namespace dmgsp {

struct KernelSpec {
  double sigma = 1.0;  // Gaussian bandwidth, must be positive and finite
};

/// Row-stochastic random-walk matrix P = D^{-1} W together with the degrees
/// that built it.
struct TransitionMatrix {
  Eigen::MatrixXd p;
  Eigen::VectorXd degrees;

  Eigen::Index size() const { return p.rows(); }
};

enum class OperatorSource { Markov, Adjacency, Laplacian };

/// Eigensystem of a shift operator. Eigenvalues are sorted by magnitude,
/// descending, with ties broken toward the larger value so the stochastic
/// eigenvalue 1 always comes first for a Markov source. Right and left
/// vectors are column-paired and biorthogonal.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd right_vectors;  // psi, columns
  Eigen::MatrixXd left_vectors;   // phi, columns
  OperatorSource source = OperatorSource::Markov;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Time-scaled eigenvector coordinates: column j holds lambda_j^t psi_j for
/// the first `l` nontrivial components.
struct DiffusionMapEmbedding {
  Eigen::MatrixXd coords;  // n x l
  double t = 0.0;
  Eigen::Index l = 0;
  // set when a negative eigenvalue met a non-integer t and the
  // sign(lambda)*|lambda|^t convention was applied
  bool noninteger_negative_power = false;
};

/// D_ij = squared Euclidean distance between rows i and j of X.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x);

/// W_ij = exp(-D_ij / (2 sigma^2)) off the diagonal; the diagonal is zeroed
/// to keep the no-self-loop invariant.
Eigen::MatrixXd gaussian_affinity(const Eigen::MatrixXd& sq_dists,
                                  double sigma);

/// scale * median of pairwise (non-squared) distances.
double median_bandwidth(const Eigen::MatrixXd& x, double scale = 0.5);

struct BghResult {
  double epsilon = 0.0;
  int intrinsic_dim = 0;
  // set when the log-log slope was monotone over the scan and the returned
  // epsilon is a boundary point
  bool no_maximum = false;
};

/// Scans epsilon over 2^-40..2^40, T(eps) = sum_ij exp(-D_ij/(4 eps)), and
/// returns the epsilon maximizing d log T / d log eps plus the dimension
/// estimate round(2 * max slope).
BghResult bgh_bandwidth(const Eigen::MatrixXd& sq_dists);

/// P = D^{-1} W. Throws isolated_node on a zero row sum.
TransitionMatrix markov_matrix(const Eigen::MatrixXd& weights);

/// Eigendecomposition routed through the symmetric conjugate
/// P_sym = D^{1/2} P D^{-1/2}; psi = D^{-1/2} v, phi = D^{1/2} v. Each
/// vector's largest-magnitude entry is made positive for reproducibility.
SpectralDecomposition decompose(const TransitionMatrix& p);

/// Coordinates lambda_j^t psi_j for j = 1..l (trivial component skipped).
DiffusionMapEmbedding embedding(const SpectralDecomposition& dec, double t,
                                Eigen::Index l);

/// Euclidean distance between embedded rows i and j.
double diffusion_distance(const DiffusionMapEmbedding& emb, Eigen::Index i,
                          Eigen::Index j);

/// phi_0 normalized to sum 1. Requires an ergodic chain
/// (|lambda_1| < 1 - 1e-10), otherwise throws not_ergodic.
Eigen::VectorXd stationary_distribution(const SpectralDecomposition& dec);

/// Embedding export: `node,coord_1..coord_l` under a one-line comment
/// recording t, l and the bandwidth used upstream.
void write_embedding_csv(const std::string& path,
                         const DiffusionMapEmbedding& emb, double sigma);

}  // namespace dmgsp
