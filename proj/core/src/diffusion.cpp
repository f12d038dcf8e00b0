#include "dmgsp/diffusion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "dmgsp/csv.hpp"

namespace dmgsp {

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) fail(errc::too_small, "need at least 2 data points");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = d(j, i) = v;
    }
  return d;
}

Eigen::MatrixXd gaussian_affinity(const Eigen::MatrixXd& sq_dists,
                                  double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(errc::bad_params, "sigma must be positive and finite");
  Eigen::MatrixXd w =
      (-sq_dists.array() / (2.0 * sigma * sigma)).exp().matrix();
  w.diagonal().setZero();
  return 0.5 * (w + w.transpose());
}

double median_bandwidth(const Eigen::MatrixXd& x, double scale) {
  const Eigen::Index n = x.rows();
  if (n < 2) fail(errc::too_small, "need at least 2 data points");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back((x.row(i) - x.row(j)).norm());
  std::sort(dists.begin(), dists.end());
  double median = dists.size() % 2 == 1
                      ? dists[dists.size() / 2]
                      : 0.5 * (dists[dists.size() / 2 - 1] +
                               dists[dists.size() / 2]);
  if (median <= 0.0)
    fail(errc::degenerate_data, "all pairwise distances are zero");
  return scale * median;
}

BghResult bgh_bandwidth(const Eigen::MatrixXd& sq_dists) {
  if (sq_dists.rows() < 2) fail(errc::too_small, "need at least 2 points");

  // eps = 2^-40 .. 2^40
  const int lo = -40, hi = 40;
  std::vector<double> log_t;
  std::vector<double> log_eps;
  log_t.reserve(hi - lo + 1);
  for (int e = lo; e <= hi; ++e) {
    const double eps = std::ldexp(1.0, e);
    // max-shift for overflow safety: exponents are -D/(4 eps) <= 0
    Eigen::ArrayXXd expo = -sq_dists.array() / (4.0 * eps);
    const double shift = expo.maxCoeff();
    const double total = (expo - shift).exp().sum();
    log_t.push_back(shift + std::log(total));
    log_eps.push_back(static_cast<double>(e) * std::log(2.0));
  }

  // forward differences of log T against log eps
  std::vector<double> slope(log_t.size() - 1);
  for (std::size_t i = 0; i + 1 < log_t.size(); ++i)
    slope[i] = (log_t[i + 1] - log_t[i]) / (log_eps[i + 1] - log_eps[i]);

  const auto max_it = std::max_element(slope.begin(), slope.end());
  const std::size_t max_loc =
      static_cast<std::size_t>(std::distance(slope.begin(), max_it));

  BghResult result;
  result.epsilon = std::exp(log_eps[max_loc]);
  result.intrinsic_dim = static_cast<int>(std::lround(2.0 * (*max_it)));
  result.no_maximum = (max_loc == 0 || max_loc == slope.size() - 1);
  return result;
}

TransitionMatrix markov_matrix(const Eigen::MatrixXd& weights) {
  const Eigen::Index n = weights.rows();
  Eigen::VectorXd degrees = weights.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degrees(i) <= 0.0)
      fail(errc::isolated_node,
           "zero degree at node " + std::to_string(i));
  }
  TransitionMatrix tm;
  tm.p = degrees.cwiseInverse().asDiagonal() * weights;
  tm.degrees = std::move(degrees);
  return tm;
}

SpectralDecomposition decompose(const TransitionMatrix& p) {
  const Eigen::Index n = p.size();
  const Eigen::VectorXd d_sqrt = p.degrees.array().sqrt();
  const Eigen::VectorXd d_inv_sqrt = p.degrees.array().rsqrt();

  // P_sym = D^{1/2} P D^{-1/2} = D^{-1/2} W D^{-1/2}
  Eigen::MatrixXd p_sym =
      d_sqrt.asDiagonal() * p.p * d_inv_sqrt.asDiagonal();
  p_sym = 0.5 * (p_sym + p_sym.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p_sym);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "symmetric eigensolver did not converge");

  // magnitude-descending order; ties resolved toward the larger value so
  // the stochastic eigenvalue 1 precedes -1 on bipartite graphs
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const Eigen::VectorXd& raw = solver.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    double ma = std::abs(raw(a)), mb = std::abs(raw(b));
    if (ma != mb) return ma > mb;
    return raw(a) > raw(b);
  });

  SpectralDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.right_vectors.resize(n, n);
  dec.left_vectors.resize(n, n);
  dec.source = OperatorSource::Markov;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index k = idx[static_cast<std::size_t>(j)];
    dec.eigenvalues(j) = raw(k);
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    Eigen::VectorXd psi = d_inv_sqrt.asDiagonal() * v;
    // sign convention: largest-magnitude entry of psi is positive
    Eigen::Index arg_max = 0;
    psi.cwiseAbs().maxCoeff(&arg_max);
    if (psi(arg_max) < 0.0) v = -v;
    dec.right_vectors.col(j) = d_inv_sqrt.asDiagonal() * v;
    dec.left_vectors.col(j) = d_sqrt.asDiagonal() * v;
  }
  return dec;
}

namespace {

double signed_power(double lambda, double t, bool& warned) {
  const bool integral = (t == std::floor(t));
  if (integral) return std::pow(lambda, t);
  if (lambda < 0.0) {
    warned = true;
    return -std::pow(-lambda, t);
  }
  return std::pow(lambda, t);
}

}  // namespace

DiffusionMapEmbedding embedding(const SpectralDecomposition& dec, double t,
                                Eigen::Index l) {
  const Eigen::Index n = dec.size();
  if (t < 0.0) fail(errc::bad_params, "diffusion time must be nonnegative");
  if (l < 1 || l > n - 1)
    fail(errc::bad_truncation,
         "truncation must be in [1, n-1], got " + std::to_string(l));

  DiffusionMapEmbedding emb;
  emb.t = t;
  emb.l = l;
  emb.coords.resize(n, l);
  for (Eigen::Index j = 1; j <= l; ++j) {
    double scale = signed_power(dec.eigenvalues(j), t,
                                emb.noninteger_negative_power);
    emb.coords.col(j - 1) = scale * dec.right_vectors.col(j);
  }
  return emb;
}

double diffusion_distance(const DiffusionMapEmbedding& emb, Eigen::Index i,
                          Eigen::Index j) {
  if (i < 0 || j < 0 || i >= emb.coords.rows() || j >= emb.coords.rows())
    fail(errc::bad_params, "node index out of range");
  return (emb.coords.row(i) - emb.coords.row(j)).norm();
}

Eigen::VectorXd stationary_distribution(const SpectralDecomposition& dec) {
  const Eigen::Index n = dec.size();
  if (n < 2) fail(errc::too_small, "need at least 2 nodes");
  if (std::abs(dec.eigenvalues(1)) >= 1.0 - 1e-10)
    fail(errc::not_ergodic,
         "no spectral gap: |lambda_1| = " +
             std::to_string(std::abs(dec.eigenvalues(1))));
  Eigen::VectorXd phi0 = dec.left_vectors.col(0);
  const double total = phi0.sum();
  if (total == 0.0) fail(errc::numerical_failure, "degenerate left vector");
  return phi0 / total;
}

void write_embedding_csv(const std::string& path,
                         const DiffusionMapEmbedding& emb, double sigma) {
  std::ostringstream out;
  out << "# t=" << format_double(emb.t) << " l=" << emb.l
      << " sigma=" << format_double(sigma) << "\n";
  out << "node";
  for (Eigen::Index j = 1; j <= emb.l; ++j) out << ",coord_" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < emb.coords.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < emb.coords.cols(); ++j)
      out << "," << format_double(emb.coords(i, j));
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace dmgsp
