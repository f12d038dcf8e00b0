#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dmgsp/diffusion.hpp"
#include "dmgsp/graph.hpp"

namespace dmgsp {

enum class GsoKind { Adjacency, Laplacian, Markov, DiffusionMap };

enum class DmMode { TruncatedSpectral, IdentityMinusPower };

struct DmParams {
  double t = 1.0;
  Eigen::Index l = 0;  // 0 means n-1 at build time
  DmMode mode = DmMode::TruncatedSpectral;
};

std::string to_string(GsoKind kind);
GsoKind gso_kind_from_string(const std::string& name);

/// Eigenbasis used for the graph Fourier transform. `inverse` is the
/// precomputed V^{-1}; for orthonormal bases it equals the transpose, for
/// Markov-derived bases it is phi^T. `active` marks the components the
/// operator actually carries: a truncated diffusion-map operator is a
/// projection, so spectral filtering through it zeroes the complement
/// instead of passing it at h(0).
struct FourierBasis {
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd inverse;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd active;  // 1.0 = in range, 0.0 = projected out; empty = all

  Eigen::Index size() const { return vectors.rows(); }
  bool is_active(Eigen::Index i) const {
    return active.size() == 0 || active(i) != 0.0;
  }
};

/// A shift operator with its Fourier basis and an a-priori spectral-norm
/// bound. The bound is checked against the measured norm at build time.
struct ShiftOperator {
  GsoKind kind = GsoKind::Adjacency;
  DmParams dm;  // meaningful only for kind == DiffusionMap
  Eigen::MatrixXd matrix;
  FourierBasis basis;
  double rho_bound = 0.0;

  Eigen::Index size() const { return matrix.rows(); }
};

enum class TikhonovSign { Plus, Minus };

/// Scalar spectral response h(lambda). Tikhonov supports both sign
/// conventions: 1/(1 + tau lambda) for nonnegative spectra and
/// 1/(1 - tau lambda) for Markov-type spectra.
struct FilterSpec {
  enum class Family { Tikhonov, Heat, Polynomial, Ideal };

  Family family = Family::Polynomial;
  double tau = 0.0;
  TikhonovSign sign = TikhonovSign::Plus;
  double time = 0.0;
  std::vector<double> coeffs{1.0};
  double cutoff = 0.0;
  // number of repeated applications; the effective response is h(lambda)^order
  int order = 1;

  static FilterSpec tikhonov(double tau, TikhonovSign sign = TikhonovSign::Plus);
  static FilterSpec heat(double time);
  static FilterSpec polynomial(std::vector<double> coeffs);
  static FilterSpec ideal(double cutoff);
  static FilterSpec identity() { return polynomial({1.0}); }

  /// h(lambda)^order; throws filter_pole when a Tikhonov denominator
  /// vanishes (|1 -+ tau lambda| <= 1e-12).
  double eval(double lambda) const;

  bool is_identity() const;
  std::string describe() const;
};

/// Builds the operator matrix and its Fourier basis:
///  - Adjacency: W, orthonormal eigensolve, eigenvalues descending;
///  - Laplacian: D - W, eigenvalues ascending (frequency order);
///  - Markov: P with the biorthogonal psi/phi basis, magnitude order;
///  - DiffusionMap TruncatedSpectral: sum_{j=1..l} lambda_j^t psi_j phi_j^T;
///  - DiffusionMap IdentityMinusPower: I - P^t.
ShiftOperator build_gso(const Graph& g, GsoKind kind, const DmParams& dm = {});

Eigen::VectorXd gft(const FourierBasis& basis, const Eigen::VectorXd& x);
Eigen::VectorXd igft(const FourierBasis& basis, const Eigen::VectorXd& spectrum);

/// y = V h(Lambda) V^{-1} x, evaluated in the spectral domain.
Eigen::VectorXd apply_filter(const ShiftOperator& s, const FilterSpec& f,
                             const Eigen::VectorXd& x);

/// sum_l h_l S^l x via iterated matrix-vector products.
Eigen::VectorXd polynomial_apply(const ShiftOperator& s,
                                 const std::vector<double>& coeffs,
                                 const Eigen::VectorXd& x);

/// igft of the elementwise product of the two spectra.
Eigen::VectorXd spectral_convolve(const FourierBasis& basis,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& g);

/// Executable residuals for the shift-operator properties. Report only:
/// nothing here throws on a violation.
struct PropertyReport {
  double linearity_residual = 0.0;
  double convolutive_residual = 0.0;
  double spectral_norm = 0.0;
  double rho_bound = 0.0;
  bool norm_within_bound = false;
  double energy_ratio_min = 0.0;
  double energy_ratio_max = 0.0;
  bool non_expansive = false;

  bool linearity_pass(double tol = 1e-12) const {
    return linearity_residual <= tol;
  }
  bool convolutive_pass(double tol = 1e-8) const {
    return convolutive_residual <= tol;
  }
  std::string to_csv() const;  // rows: property,residual,pass
};

PropertyReport check_gso_properties(const ShiftOperator& s, double tol = 1e-8,
                                    int probes = 1000,
                                    std::uint64_t seed = 1234);

/// Same residuals for an arbitrary matrix/basis pair; used for negative
/// controls where the operator is not one of the shipped kinds.
PropertyReport check_operator_properties(const Eigen::MatrixXd& matrix,
                                         const FourierBasis& basis,
                                         double rho_bound, double tol = 1e-8,
                                         int probes = 1000,
                                         std::uint64_t seed = 1234);

}  // namespace dmgsp
