#include "dmgsp/learning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dmgsp/csv.hpp"

namespace dmgsp {

void LearnOptions::validate() const {
  if (max_iters < 0) fail(errc::bad_params, "max_iters must be >= 0");
  if (!(tol > 0.0)) fail(errc::bad_params, "tol must be positive");
  if (!(step > 0.0)) fail(errc::bad_params, "step must be positive");
  if (projection_iters < 1)
    fail(errc::bad_params, "projection_iters must be positive");
  if (tv_alpha < 0.0) fail(errc::bad_params, "tv_alpha must be >= 0");
}

SampleCovariance sample_covariance(const Eigen::MatrixXd& signals) {
  const Eigen::Index m = signals.rows();
  if (m < 2) fail(errc::too_few_observations, "need at least 2 observations");
  Eigen::RowVectorXd mean = signals.colwise().mean();
  Eigen::MatrixXd centered = signals.rowwise() - mean;
  Eigen::MatrixXd sigma =
      (centered.transpose() * centered) / static_cast<double>(m - 1);
  SampleCovariance cov;
  cov.sigma = 0.5 * (sigma + sigma.transpose());
  cov.observations = m;
  return cov;
}

namespace {

void require_psd(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  const double max_eig = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  if (solver.eigenvalues().minCoeff() < -1e-8 * max_eig)
    fail(errc::not_psd, "covariance is not positive semidefinite");
}

double constraint_violation_ds(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  double v = 0.0;
  v = std::max(v, (w.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
  v = std::max(v, (w.colwise().sum().transpose() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
  v = std::max(v, std::max(0.0, -w.minCoeff()));
  return v;
}

}  // namespace

SampleCovariance prefilter_covariance(const SampleCovariance& cov,
                                      const ShiftOperator& basis_source,
                                      const FilterSpec& f) {
  (void)basis_source;  // supplies the filter family/parameters by convention
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.sigma);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "covariance eigensolver did not converge");
  const Eigen::Index n = cov.sigma.rows();
  // the filter scales the spectrum: output eigenvalues are lambda h(lambda)
  Eigen::VectorXd filtered(n);
  for (Eigen::Index i = 0; i < n; ++i)
    filtered(i) = solver.eigenvalues()(i) * f.eval(solver.eigenvalues()(i));
  Eigen::MatrixXd out = solver.eigenvectors() * filtered.asDiagonal() *
                        solver.eigenvectors().transpose();
  SampleCovariance result;
  result.sigma = 0.5 * (out + out.transpose());
  result.observations = cov.observations;
  return result;
}

double markov_var_objective(const Eigen::MatrixXd& sigma,
                            const Eigen::MatrixXd& w) {
  Eigen::VectorXd r = w.rowwise().sum();
  Eigen::VectorXd e(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    e(i) = r(i) > 0.0 ? 1.0 / r(i) : 0.0;
  Eigen::MatrixXd m = e.asDiagonal() * w * sigma * w.transpose();
  return (sigma - m).squaredNorm();
}

Eigen::MatrixXd markov_var_gradient(const Eigen::MatrixXd& sigma,
                                    const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  Eigen::VectorXd r = w.rowwise().sum();
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = r(i) > 0.0 ? 1.0 / r(i) : 0.0;

  const Eigen::MatrixXd b = w * sigma * w.transpose();
  const Eigen::MatrixXd residual = sigma - e.asDiagonal() * b;

  // d/dW of the pseudo-inverted degree matrix: row-constant contribution
  const Eigen::VectorXd s = (b.cwiseProduct(residual)).rowwise().sum();
  Eigen::MatrixXd grad =
      (2.0 * s.cwiseProduct(e).cwiseProduct(e)) * Eigen::RowVectorXd::Ones(n);
  grad.noalias() -= 2.0 * (e.asDiagonal() * residual * w * sigma);
  grad.noalias() -= 2.0 * (residual.transpose() * (e.asDiagonal() * w) * sigma);
  return grad;
}

namespace {

// Euclidean projection onto {X : X 1 = 1, X^T 1 = 1}
void project_affine_sums(Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd r = x.rowwise().sum();
  Eigen::VectorXd c = x.colwise().sum().transpose();
  const double total = r.sum();
  x += inv_n * (Eigen::VectorXd::Ones(n) - r) * Eigen::RowVectorXd::Ones(n);
  x += inv_n * Eigen::VectorXd::Ones(n) *
       (Eigen::VectorXd::Ones(n) - c).transpose();
  x.array() += (total - static_cast<double>(n)) * inv_n * inv_n;
}

}  // namespace

// Dykstra alternation between the nonnegativity cone (clip, with the
// correction term) and the doubly stochastic affine set (closed form, no
// correction needed for affine sets). Sinkhorn-style scaling alone stalls
// once the iterate's support gets sparse.
Eigen::MatrixXd project_doubly_stochastic(Eigen::MatrixXd w, int sweeps) {
  const Eigen::Index n = w.rows();
  Eigen::MatrixXd increment = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd clipped(n, n);
  for (int s = 0; s < sweeps; ++s) {
    Eigen::MatrixXd shifted = w + increment;
    clipped = shifted.cwiseMax(0.0);
    increment = shifted - clipped;
    w = clipped;
    project_affine_sums(w);
    if ((w - clipped).cwiseAbs().maxCoeff() < 1e-13) break;
  }
  return w.cwiseMax(0.0);
}

namespace {

struct Descent {
  std::vector<double> trace;
  int iterations = 0;
  LearnStatus status = LearnStatus::MaxIters;
  bool converged = false;
};

// projected gradient with halving on non-decrease; shared by both solvers
template <typename Objective, typename Gradient, typename Project>
Descent descend(Eigen::MatrixXd& w, const LearnOptions& opts,
                Objective objective, Gradient gradient, Project project) {
  Descent d;
  double f = objective(w);
  d.trace.push_back(f);
  double step = opts.step;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Eigen::MatrixXd g = gradient(w);
    bool accepted = false;
    Eigen::MatrixXd candidate;
    double f_candidate = f;
    while (step >= 1e-18) {
      candidate = project(w - step * g);
      f_candidate = objective(candidate);
      if (std::isfinite(f_candidate) && f_candidate < f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      d.status = LearnStatus::NoProgress;
      return d;
    }
    const double delta = f - f_candidate;
    w = std::move(candidate);
    f = f_candidate;
    d.trace.push_back(f);
    d.iterations = it;
    if (delta < opts.tol) {
      d.status = LearnStatus::Converged;
      d.converged = true;
      return d;
    }
    step = std::min(step * 2.0, opts.step);
  }
  d.status = LearnStatus::MaxIters;
  return d;
}

}  // namespace

LearnResult min_markov_var(const SampleCovariance& cov,
                           const LearnOptions& opts) {
  opts.validate();
  const Eigen::Index n = cov.sigma.rows();
  if (n < 2) fail(errc::too_small, "need at least 2 nodes");
  require_psd(cov.sigma);

  // The flat 0.5*ones start is a stationary point whenever the instance is
  // permutation-symmetric enough (uniform row-constant gradient projects to
  // zero). A covariance-derived tie-breaker escapes those stalls while
  // staying deterministic and permutation-equivariant; it vanishes exactly
  // on exchange-symmetric covariances such as the identity.
  Eigen::MatrixXd tie_break = cov.sigma;
  tie_break.diagonal().setZero();
  const double scale = tie_break.cwiseAbs().maxCoeff();
  if (scale > 0.0) tie_break /= scale;
  Eigen::MatrixXd w = project_doubly_stochastic(
      Eigen::MatrixXd::Constant(n, n, 0.5) + 1e-3 * tie_break,
      opts.projection_iters);

  const Eigen::MatrixXd& sigma = cov.sigma;
  Descent d = descend(
      w, opts, [&](const Eigen::MatrixXd& m) { return markov_var_objective(sigma, m); },
      [&](const Eigen::MatrixXd& m) { return markov_var_gradient(sigma, m); },
      [&](const Eigen::MatrixXd& m) {
        return project_doubly_stochastic(m, opts.projection_iters);
      });

  LearnResult result;
  result.constraint_violation_presym = constraint_violation_ds(w);
  result.w_est = 0.5 * (w + w.transpose());
  result.constraint_violation = constraint_violation_ds(result.w_est);
  result.objective_trace = std::move(d.trace);
  result.iterations = d.iterations;
  result.converged = d.converged;
  result.status = d.status;
  return result;
}

namespace {

// Laplacian objective pieces for the total-variation solver
struct TvObjective {
  const Eigen::MatrixXd& sigma;
  double alpha;

  Eigen::MatrixXd laplacian_of(const Eigen::MatrixXd& w) const {
    Eigen::MatrixXd lap = -w;
    lap.diagonal() += w.rowwise().sum();
    return lap;
  }

  double operator()(const Eigen::MatrixXd& w) const {
    const Eigen::Index n = w.rows();
    Eigen::MatrixXd lap = laplacian_of(w);
    Eigen::MatrixXd reg =
        lap + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success)
      return std::numeric_limits<double>::infinity();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pivot = llt.matrixL()(i, i);
      if (pivot <= 0.0) return std::numeric_limits<double>::infinity();
      log_det += 2.0 * std::log(pivot);
    }
    return (sigma * lap).trace() - log_det + alpha * w.sum();
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& w) const {
    const Eigen::Index n = w.rows();
    Eigen::MatrixXd lap = laplacian_of(w);
    Eigen::MatrixXd reg =
        lap + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    Eigen::MatrixXd k = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double tv_term = sigma(i, i) + sigma(j, j) - 2.0 * sigma(i, j);
        const double det_term = k(i, i) + k(j, j) - 2.0 * k(i, j);
        const double v = tv_term - det_term + 2.0 * alpha;
        g(i, j) = g(j, i) = v;
      }
    }
    return g;
  }
};

}  // namespace

LearnResult min_total_var(const SampleCovariance& cov, double alpha,
                          const LearnOptions& opts) {
  opts.validate();
  if (alpha < 0.0) fail(errc::bad_params, "alpha must be >= 0");
  const Eigen::Index n = cov.sigma.rows();
  if (n < 2) fail(errc::too_small, "need at least 2 nodes");
  require_psd(cov.sigma);

  TvObjective obj{cov.sigma, alpha};
  // uniform complete graph with unit degrees as the starting point
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(
      n, n, 1.0 / static_cast<double>(n - 1));
  w.diagonal().setZero();

  Descent d = descend(
      w, opts, [&](const Eigen::MatrixXd& m) { return obj(m); },
      [&](const Eigen::MatrixXd& m) { return obj.gradient(m); },
      [&](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd p = 0.5 * (m + m.transpose());
        p = p.cwiseMax(0.0);
        p.diagonal().setZero();
        return p;
      });

  auto violation = [](const Eigen::MatrixXd& m) {
    double v = std::max(0.0, -m.minCoeff());
    v = std::max(v, (m - m.transpose()).cwiseAbs().maxCoeff());
    return v;
  };

  LearnResult result;
  result.constraint_violation_presym = violation(w);
  result.w_est = 0.5 * (w + w.transpose());
  result.constraint_violation = violation(result.w_est);
  result.objective_trace = std::move(d.trace);
  result.iterations = d.iterations;
  result.converged = d.converged;
  result.status = d.status;
  return result;
}

Eigen::MatrixXd filter_signals(const Eigen::MatrixXd& signals,
                               const ShiftOperator& s, const FilterSpec& f) {
  const Eigen::Index n = s.size();
  if (signals.cols() != n) fail(errc::bad_params, "dimension mismatch");
  Eigen::VectorXd response(n);
  for (Eigen::Index i = 0; i < n; ++i)
    response(i) =
        s.basis.is_active(i) ? f.eval(s.basis.eigenvalues(i)) : 0.0;
  // rows are signals: Y^T = V h(Lambda) V^{-1} X^T
  return (s.basis.vectors * response.asDiagonal() * s.basis.inverse *
          signals.transpose())
      .transpose();
}

LearnResult learn_pipeline(const Eigen::MatrixXd& signals, const Graph& g_hint,
                           const GsoSpec& gso, const FilterSpec& f,
                           LearnMethod method, const LearnOptions& opts) {
  if (signals.cols() != g_hint.size())
    fail(errc::bad_params, "signal width does not match graph size");
  if (!is_connected(g_hint))
    fail(errc::not_connected, "basis graph must be connected");

  Eigen::MatrixXd filtered;
  if (f.is_identity()) {
    filtered = signals;
  } else {
    ShiftOperator s = build_gso(g_hint, gso.kind, gso.dm);
    filtered = filter_signals(signals, s, f);
  }
  SampleCovariance cov = sample_covariance(filtered);
  return method == LearnMethod::MV ? min_markov_var(cov, opts)
                                   : min_total_var(cov, opts.tv_alpha, opts);
}

void write_learn_result(const std::string& csv_path,
                        const std::string& sidecar_path,
                        const LearnResult& result) {
  std::ostringstream out;
  out << "i,j,weight\n";
  const Eigen::Index n = result.w_est.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      out << i << "," << j << "," << format_double(result.w_est(i, j)) << "\n";
  write_text_file(csv_path, out.str());

  nlohmann::json meta;
  meta["iterations"] = result.iterations;
  meta["converged"] = result.converged;
  meta["status"] = result.status == LearnStatus::Converged ? "converged"
                   : result.status == LearnStatus::NoProgress
                       ? "no_progress"
                       : "max_iters";
  meta["constraint_violation"] = result.constraint_violation;
  meta["objective_trace"] = result.objective_trace;
  write_text_file(sidecar_path, meta.dump(2) + "\n");
}

}  // namespace dmgsp
