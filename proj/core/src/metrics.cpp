#include "dmgsp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dmgsp {

double nrmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
  if (y.size() != y_hat.size()) fail(errc::bad_params, "dimension mismatch");
  if (y.size() == 0) fail(errc::bad_params, "empty reference");
  const double range = y.maxCoeff() - y.minCoeff();
  if (range <= 0.0)
    fail(errc::zero_range, "reference values have zero range");
  const double mse = (y - y_hat).squaredNorm() / static_cast<double>(y.size());
  return std::sqrt(mse) / range;
}

namespace {

Eigen::VectorXd magnitude_sorted(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(v(a)), mb = std::abs(v(b));
    if (ma != mb) return ma > mb;
    return v(a) > v(b);
  });
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out(i) = v(idx[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

ReeResult ree(const Eigen::VectorXd& lambda_ref,
              const Eigen::VectorXd& lambda_est, const MetricOptions& opts) {
  const Eigen::Index k =
      opts.k > 0 ? opts.k : std::min(lambda_ref.size(), lambda_est.size());
  if (k < 2) fail(errc::bad_params, "k must be at least 2");
  if (lambda_ref.size() < k || lambda_est.size() < k)
    fail(errc::bad_params, "spectra shorter than k");

  const Eigen::VectorXd ref = magnitude_sorted(lambda_ref);
  const Eigen::VectorXd est = magnitude_sorted(lambda_est);

  ReeResult result;
  double acc = 0.0;
  Eigen::Index used = 0;
  // 1-based i = 2..k: the largest eigenvalue is excluded by the formula
  for (Eigen::Index i = 1; i < k; ++i) {
    if (std::abs(ref(i)) < opts.eig_floor) {
      ++result.skipped;
      continue;
    }
    double term = (est(i) - ref(i)) / ref(i);
    if (opts.mode == ReeMode::Absolute) term = std::abs(term);
    acc += term;
    ++used;
  }
  if (used == 0)
    fail(errc::all_skipped, "every reference eigenvalue fell below the floor");
  // prefactor stays 1/k even though the sum has k-1 terms
  result.value = acc / static_cast<double>(k);
  return result;
}

Eigen::VectorXd upper_triangle(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd out(n * (n - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out(idx++) = m(i, j);
  return out;
}

}  // namespace dmgsp
