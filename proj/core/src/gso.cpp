#include "dmgsp/gso.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmgsp/csv.hpp"
#include "dmgsp/rng.hpp"

namespace dmgsp {

std::string to_string(GsoKind kind) {
  switch (kind) {
    case GsoKind::Adjacency: return "A";
    case GsoKind::Laplacian: return "L";
    case GsoKind::Markov: return "P";
    case GsoKind::DiffusionMap: return "DM";
  }
  return "?";
}

GsoKind gso_kind_from_string(const std::string& name) {
  if (name == "A" || name == "adjacency") return GsoKind::Adjacency;
  if (name == "L" || name == "laplacian") return GsoKind::Laplacian;
  if (name == "P" || name == "markov") return GsoKind::Markov;
  if (name == "DM" || name == "diffusion-map") return GsoKind::DiffusionMap;
  fail(errc::bad_params, "unknown shift operator kind: " + name);
}

FilterSpec FilterSpec::tikhonov(double tau, TikhonovSign sign) {
  if (!(tau >= 0.0 && tau <= 1.0))
    fail(errc::bad_params, "tikhonov tau must be in [0,1]");
  FilterSpec f;
  f.family = Family::Tikhonov;
  f.tau = tau;
  f.sign = sign;
  return f;
}

FilterSpec FilterSpec::heat(double time) {
  if (time < 0.0) fail(errc::bad_params, "heat time must be nonnegative");
  FilterSpec f;
  f.family = Family::Heat;
  f.time = time;
  return f;
}

FilterSpec FilterSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) fail(errc::bad_params, "polynomial needs coefficients");
  for (double c : coeffs)
    if (!std::isfinite(c))
      fail(errc::bad_params, "polynomial coefficients must be finite");
  FilterSpec f;
  f.family = Family::Polynomial;
  f.coeffs = std::move(coeffs);
  return f;
}

FilterSpec FilterSpec::ideal(double cutoff) {
  FilterSpec f;
  f.family = Family::Ideal;
  f.cutoff = cutoff;
  return f;
}

double FilterSpec::eval(double lambda) const {
  double h = 1.0;
  switch (family) {
    case Family::Tikhonov: {
      const double denom =
          sign == TikhonovSign::Plus ? 1.0 + tau * lambda : 1.0 - tau * lambda;
      if (std::abs(denom) <= 1e-12)
        fail(errc::filter_pole,
             "tikhonov denominator vanishes at lambda = " +
                 std::to_string(lambda));
      h = 1.0 / denom;
      break;
    }
    case Family::Heat:
      h = std::exp(-time * lambda);
      break;
    case Family::Polynomial: {
      h = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        h = h * lambda + *it;
      break;
    }
    case Family::Ideal:
      h = lambda <= cutoff ? 1.0 : 0.0;
      break;
  }
  if (order == 1) return h;
  return std::pow(h, order);
}

bool FilterSpec::is_identity() const {
  if (family == Family::Polynomial)
    return coeffs.size() == 1 && coeffs[0] == 1.0;
  if (family == Family::Tikhonov) return tau == 0.0;
  return false;
}

std::string FilterSpec::describe() const {
  std::ostringstream out;
  switch (family) {
    case Family::Tikhonov:
      out << "tikhonov(tau=" << format_double(tau) << ","
          << (sign == TikhonovSign::Plus ? "+" : "-") << ")";
      break;
    case Family::Heat:
      out << "heat(t=" << format_double(time) << ")";
      break;
    case Family::Polynomial: {
      out << "poly(";
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i) out << ";";
        out << format_double(coeffs[i]);
      }
      out << ")";
      break;
    }
    case Family::Ideal:
      out << "ideal(cutoff=" << format_double(cutoff) << ")";
      break;
  }
  if (order != 1) out << "^" << order;
  return out.str();
}

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.transpose() * m);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

// symmetric eigensolve with a deterministic sign convention
void symmetric_basis(const Eigen::MatrixXd& m, bool ascending,
                     FourierBasis& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "symmetric eigensolver did not converge");
  const Eigen::Index n = m.rows();
  basis.vectors.resize(n, n);
  basis.eigenvalues.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Eigen returns ascending order
    const Eigen::Index k = ascending ? j : n - 1 - j;
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    basis.vectors.col(j) = v;
    basis.eigenvalues(j) = solver.eigenvalues()(k);
  }
  basis.inverse = basis.vectors.transpose();
}

double signed_power(double lambda, double t) {
  if (t == std::floor(t)) return std::pow(lambda, t);
  if (lambda < 0.0) return -std::pow(-lambda, t);
  return std::pow(lambda, t);
}

Eigen::MatrixXd markov_power(const TransitionMatrix& tm,
                             const SpectralDecomposition& dec, double t) {
  const Eigen::Index n = tm.size();
  if (t == std::floor(t) && t >= 0.0) {
    auto k = static_cast<long>(t);
    if (k == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd acc = tm.p;
    for (long i = 1; i < k; ++i) acc = acc * tm.p;
    return acc;
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    acc += signed_power(dec.eigenvalues(j), t) * dec.right_vectors.col(j) *
           dec.left_vectors.col(j).transpose();
  }
  return acc;
}

}  // namespace

ShiftOperator build_gso(const Graph& g, GsoKind kind, const DmParams& dm) {
  const Eigen::Index n = g.size();
  ShiftOperator s;
  s.kind = kind;

  const Eigen::VectorXd deg = g.degrees();
  const double d_max = deg.maxCoeff();

  switch (kind) {
    case GsoKind::Adjacency: {
      s.matrix = g.weights();
      symmetric_basis(s.matrix, /*ascending=*/false, s.basis);
      s.rho_bound = d_max;  // Gershgorin on a symmetric nonnegative matrix
      break;
    }
    case GsoKind::Laplacian: {
      const Eigen::VectorXd d = g.degrees();
      s.matrix = -g.weights();
      s.matrix.diagonal() += d;
      symmetric_basis(s.matrix, /*ascending=*/true, s.basis);
      s.rho_bound = 2.0 * d_max;
      break;
    }
    case GsoKind::Markov: {
      TransitionMatrix tm = markov_matrix(g.weights());
      SpectralDecomposition dec = decompose(tm);
      s.matrix = tm.p;
      s.basis.vectors = dec.right_vectors;
      s.basis.inverse = dec.left_vectors.transpose();
      s.basis.eigenvalues = dec.eigenvalues;
      s.rho_bound = std::sqrt(d_max / deg.minCoeff());
      break;
    }
    case GsoKind::DiffusionMap: {
      if (dm.t < 0.0) fail(errc::bad_params, "diffusion time must be >= 0");
      Eigen::Index l = dm.l == 0 ? n - 1 : dm.l;
      if (l < 1 || l > n - 1)
        fail(errc::bad_params, "truncation must be in [1, n-1]");
      TransitionMatrix tm = markov_matrix(g.weights());
      SpectralDecomposition dec = decompose(tm);
      s.dm = dm;
      s.dm.l = l;
      s.basis.vectors = dec.right_vectors;
      s.basis.inverse = dec.left_vectors.transpose();
      s.basis.eigenvalues.setZero(n);
      const double cond = std::sqrt(d_max / deg.minCoeff());
      if (dm.mode == DmMode::TruncatedSpectral) {
        s.matrix = Eigen::MatrixXd::Zero(n, n);
        s.basis.active = Eigen::VectorXd::Zero(n);
        for (Eigen::Index j = 1; j <= l; ++j) {
          const double scale = signed_power(dec.eigenvalues(j), dm.t);
          s.matrix += scale * dec.right_vectors.col(j) *
                      dec.left_vectors.col(j).transpose();
          s.basis.eigenvalues(j) = scale;
          s.basis.active(j) = 1.0;
        }
        s.rho_bound = cond;
      } else {
        s.matrix = Eigen::MatrixXd::Identity(n, n) - markov_power(tm, dec, dm.t);
        for (Eigen::Index j = 0; j < n; ++j)
          s.basis.eigenvalues(j) =
              1.0 - signed_power(dec.eigenvalues(j), dm.t);
        s.rho_bound = 1.0 + cond;
      }
      break;
    }
  }

  const double norm = spectral_norm(s.matrix);
  if (norm > s.rho_bound + 1e-8)
    fail(errc::numerical_failure,
         "spectral norm " + std::to_string(norm) + " exceeds bound " +
             std::to_string(s.rho_bound));
  return s;
}

Eigen::VectorXd gft(const FourierBasis& basis, const Eigen::VectorXd& x) {
  if (x.size() != basis.size()) fail(errc::bad_params, "dimension mismatch");
  return basis.inverse * x;
}

Eigen::VectorXd igft(const FourierBasis& basis,
                     const Eigen::VectorXd& spectrum) {
  if (spectrum.size() != basis.size())
    fail(errc::bad_params, "dimension mismatch");
  return basis.vectors * spectrum;
}

Eigen::VectorXd apply_filter(const ShiftOperator& s, const FilterSpec& f,
                             const Eigen::VectorXd& x) {
  const Eigen::Index n = s.size();
  if (x.size() != n) fail(errc::bad_params, "dimension mismatch");
  Eigen::VectorXd response(n);
  for (Eigen::Index i = 0; i < n; ++i)
    response(i) =
        s.basis.is_active(i) ? f.eval(s.basis.eigenvalues(i)) : 0.0;
  Eigen::VectorXd spectrum = gft(s.basis, x);
  return igft(s.basis, response.cwiseProduct(spectrum).eval());
}

Eigen::VectorXd polynomial_apply(const ShiftOperator& s,
                                 const std::vector<double>& coeffs,
                                 const Eigen::VectorXd& x) {
  if (coeffs.empty()) fail(errc::bad_params, "need coefficients");
  if (x.size() != s.size()) fail(errc::bad_params, "dimension mismatch");
  Eigen::VectorXd acc = coeffs[0] * x;
  Eigen::VectorXd power = x;
  for (std::size_t l = 1; l < coeffs.size(); ++l) {
    power = s.matrix * power;
    acc += coeffs[l] * power;
  }
  return acc;
}

Eigen::VectorXd spectral_convolve(const FourierBasis& basis,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& g) {
  Eigen::VectorXd fh = gft(basis, f);
  Eigen::VectorXd gh = gft(basis, g);
  return igft(basis, fh.cwiseProduct(gh).eval());
}

PropertyReport check_operator_properties(const Eigen::MatrixXd& matrix,
                                         const FourierBasis& basis,
                                         double rho_bound, double tol,
                                         int probes, std::uint64_t seed) {
  const Eigen::Index n = matrix.rows();
  Rng rng(seed);
  PropertyReport report;

  double lin = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
    const double alpha = rng.uniform(-2.0, 2.0);
    const double scale = std::max(1.0, (alpha * x + y).norm());
    lin = std::max(lin, (matrix * (alpha * x + y) - alpha * (matrix * x) -
                         matrix * y).norm() / scale);
    const double ratio = (matrix * x).norm() / x.norm();
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  report.linearity_residual = lin;
  report.energy_ratio_min = ratio_min;
  report.energy_ratio_max = ratio_max;
  report.non_expansive = ratio_max <= 1.0 + tol;

  Eigen::MatrixXd conj = basis.inverse * matrix * basis.vectors;
  conj.diagonal().setZero();
  report.convolutive_residual = conj.cwiseAbs().maxCoeff();

  report.spectral_norm = spectral_norm(matrix);
  report.rho_bound = rho_bound;
  report.norm_within_bound = report.spectral_norm <= rho_bound + 1e-8;
  return report;
}

PropertyReport check_gso_properties(const ShiftOperator& s, double tol,
                                    int probes, std::uint64_t seed) {
  return check_operator_properties(s.matrix, s.basis, s.rho_bound, tol,
                                   probes, seed);
}

std::string PropertyReport::to_csv() const {
  std::ostringstream out;
  out << "property,residual,pass\n";
  out << "linearity," << format_double(linearity_residual) << ","
      << (linearity_pass() ? 1 : 0) << "\n";
  out << "convolutive," << format_double(convolutive_residual) << ","
      << (convolutive_pass() ? 1 : 0) << "\n";
  out << "norm_bound," << format_double(spectral_norm) << ","
      << (norm_within_bound ? 1 : 0) << "\n";
  out << "energy_ratio_max," << format_double(energy_ratio_max) << ","
      << (non_expansive ? 1 : 0) << "\n";
  out << "energy_ratio_min," << format_double(energy_ratio_min) << ",1\n";
  return out.str();
}

}  // namespace dmgsp
