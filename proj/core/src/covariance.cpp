#include "robustmom/covariance.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "robustmom/mean.hpp"

namespace robustmom {

namespace {

std::vector<double> quadratic_medians(const BlockMoments& moments, const DirectionPool& pool) {
  std::vector<double> meds(static_cast<std::size_t>(pool.size()));
  std::vector<double> quad(static_cast<std::size_t>(moments.n_blocks()));
  for (Index v = 0; v < pool.size(); ++v) {
    const Vector& u = pool.directions[static_cast<std::size_t>(v)];
    for (Index k = 0; k < moments.n_blocks(); ++k)
      quad[static_cast<std::size_t>(k)] =
          u.dot(moments.moments[static_cast<std::size_t>(k)].m * u);
    meds[static_cast<std::size_t>(v)] = lower_median(quad);
  }
  return meds;
}

double objective_from_medians(const Matrix& y, const DirectionPool& pool,
                              const std::vector<double>& meds, Index* argmax = nullptr) {
  double best = -1.0;
  Index best_v = 0;
  for (Index v = 0; v < pool.size(); ++v) {
    const Vector& u = pool.directions[static_cast<std::size_t>(v)];
    const double r = std::abs(meds[static_cast<std::size_t>(v)] - u.dot(y * u));
    if (r > best) {
      best = r;
      best_v = v;
    }
  }
  if (argmax != nullptr) *argmax = best_v;
  return best;
}

Matrix entrywise_median(const BlockMoments& moments) {
  const Index d = moments.moments.front().dim();
  const Index k = moments.n_blocks();
  Matrix out(d, d);
  std::vector<double> vals(static_cast<std::size_t>(k));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j <= i; ++j) {
      for (Index b = 0; b < k; ++b)
        vals[static_cast<std::size_t>(b)] = moments.moments[static_cast<std::size_t>(b)].m(i, j);
      const double m = lower_median(vals);
      out(i, j) = m;
      out(j, i) = m;
    }
  return out;
}

}  // namespace

double cov_objective(const SymMatrix& y, const BlockMoments& moments,
                     const DirectionPool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("cov_objective: empty pool");
  if (moments.moments.empty() || y.dim() != pool.dim ||
      moments.moments.front().dim() != pool.dim)
    throw std::invalid_argument("cov_objective: dimension mismatch");
  const auto meds = quadratic_medians(moments, pool);
  return objective_from_medians(y.m, pool, meds);
}

CovEstimate cov_mom_estimate(const Dataset& data, Index n_blocks, const DirectionPool& pool,
                             const CovMomOptions& opts, RngStream rng) {
  if (pool.size() == 0) throw std::invalid_argument("cov_mom_estimate: empty pool");
  if (pool.dim != data.dim())
    throw std::invalid_argument("cov_mom_estimate: pool dimension mismatch");

  CovEstimate est;
  est.n_blocks = n_blocks;
  std::optional<Vector> center;
  if (opts.center == CovCenter::mom_mean) {
    center = lm_mom_estimate(data, n_blocks, pool, LmMomOptions{}, rng).point;
    est.centered = true;
    est.mean_used = center;
  }
  const BlockPartition part = partition(data.n_samples(), n_blocks, rng);
  const BlockMoments moments =
      block_second_moments(data, part, center ? &*center : nullptr);
  const auto meds = quadratic_medians(moments, pool);

  Matrix y = entrywise_median(moments);
  double best = objective_from_medians(y, pool, meds);
  Matrix best_y = y;
  double step = std::max(best, opts.tol);
  // same accept hysteresis and step floor as the mean optimizer, for
  // scale/translation-stable descent paths
  const double accept_margin = 1e-10 * (1.0 + best);
  const double step_floor = 0.1 * opts.tol;
  Index iters = 0;
  while (iters < opts.max_iters && best > opts.tol && step > step_floor) {
    ++iters;
    Index v = 0;
    objective_from_medians(y, pool, meds, &v);
    const Vector& u = pool.directions[static_cast<std::size_t>(v)];
    const double residual = meds[static_cast<std::size_t>(v)] - u.dot(y * u);
    const Matrix trial =
        y + step * (residual >= 0.0 ? 1.0 : -1.0) * (u * u.transpose());
    const double obj = objective_from_medians(trial, pool, meds);
    if (obj < best - accept_margin) {
      best = obj;
      y = trial;
      best_y = trial;
    } else {
      step *= 0.5;
    }
  }
  est.iterations = iters;
  est.raw_matrix = SymMatrix{best_y};

  if (opts.psd_project) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (best_y + best_y.transpose()));
    Vector lam = es.eigenvalues().cwiseMax(0.0);
    Matrix proj = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    proj = 0.5 * (proj + proj.transpose());
    est.matrix = SymMatrix{std::move(proj)};
    est.psd_projected = true;
    est.achieved_eps = objective_from_medians(est.matrix.m, pool, meds);
  } else {
    est.matrix = est.raw_matrix;
    est.achieved_eps = best;
  }
  return est;
}

double cov_error_bound(double sigma, Index n_blocks, Index n_samples) {
  if (sigma < 0.0 || n_blocks < 1 || n_samples < n_blocks)
    throw std::invalid_argument("cov_error_bound: invalid arguments");
  return 8.0 * sigma *
         std::sqrt(static_cast<double>(n_blocks) / static_cast<double>(n_samples));
}

double sigma_weak_oracle(const DistributionSpec& sampler, const SymMatrix& true_second_moment,
                         const DirectionPool& pool, Index n_mc, RngStream rng) {
  if (n_mc < 10000) throw std::invalid_argument("sigma_weak_oracle: n_mc must be >= 10^4");
  if (pool.size() == 0) throw std::invalid_argument("sigma_weak_oracle: empty pool");
  if (true_second_moment.dim() != pool.dim)
    throw std::invalid_argument("sigma_weak_oracle: dimension mismatch");
  const Dataset draws = sample_clean(sampler, n_mc, rng);
  double best = 0.0;
  for (const Vector& u : pool.directions) {
    const double s = u.dot(true_second_moment.m * u);
    const Vector proj = draws.values * u;
    double acc = 0.0;
    for (Index i = 0; i < n_mc; ++i) {
      const double r = s - proj[i] * proj[i];
      acc += r * r;
    }
    best = std::max(best, acc / static_cast<double>(n_mc));
  }
  return std::sqrt(best);
}

EigenDecomposition sym_eigendecomposition(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a.m + a.m.transpose()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eigendecomposition: solver failed");
  const Index d = a.dim();
  EigenDecomposition out;
  out.eigvals = Vector(d);
  out.eigvecs = Matrix(d, d);
  for (Index j = 0; j < d; ++j) {  // Eigen returns ascending order
    out.eigvals[j] = es.eigenvalues()[d - 1 - j];
    out.eigvecs.col(j) = es.eigenvectors().col(d - 1 - j);
  }
  return out;
}

PcaResult robust_pca(const Dataset& data, Index n_blocks, Index k, const DirectionPool& pool,
                     std::optional<double> sigma_hint, RngStream rng) {
  const Index d = data.dim();
  if (k < 1 || k >= d) throw std::invalid_argument("robust_pca: need 1 <= k < dim");
  CovMomOptions opts;
  opts.center = CovCenter::mom_mean;
  opts.psd_project = true;
  const CovEstimate cov = cov_mom_estimate(data, n_blocks, pool, opts, rng);
  const EigenDecomposition eig = sym_eigendecomposition(cov.matrix);

  PcaResult out;
  out.k = k;
  out.eigvals = eig.eigvals;
  Matrix proj = Matrix::Zero(d, d);
  for (Index j = 0; j < k; ++j)
    proj.noalias() += eig.eigvecs.col(j) * eig.eigvecs.col(j).transpose();
  proj = 0.5 * (proj + proj.transpose());
  out.projector = SymMatrix{std::move(proj)};
  out.gap = eig.eigvals[k - 1] - eig.eigvals[k];
  if (sigma_hint) {
    const double rate =
        *sigma_hint * std::sqrt(static_cast<double>(n_blocks) /
                                static_cast<double>(data.n_samples()));
    out.bound = 8.0 / out.gap * rate;
    out.gap_ok = out.gap >= 16.0 * rate;
  }
  return out;
}

double frobenius_error(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("frobenius_error: dimension mismatch");
  return (a.m - b.m).norm();
}

}  // namespace robustmom
