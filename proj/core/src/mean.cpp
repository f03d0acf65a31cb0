#include "robustmom/mean.hpp"

#include <cmath>
#include <stdexcept>

namespace robustmom {

namespace {

// medians of block-mean projections per pool direction; subtracting <y,v>
// commutes with the median, so these are computed once per estimate
std::vector<double> projection_medians(const BlockMeans& means, const DirectionPool& pool) {
  std::vector<double> meds(static_cast<std::size_t>(pool.size()));
  std::vector<double> proj(static_cast<std::size_t>(means.n_blocks()));
  for (Index v = 0; v < pool.size(); ++v) {
    const Vector& dir = pool.directions[static_cast<std::size_t>(v)];
    for (Index k = 0; k < means.n_blocks(); ++k)
      proj[static_cast<std::size_t>(k)] = means.means[static_cast<std::size_t>(k)].dot(dir);
    meds[static_cast<std::size_t>(v)] = lower_median(proj);
  }
  return meds;
}

double objective_from_medians(const Vector& y, const DirectionPool& pool,
                              const std::vector<double>& meds, Index* argmax = nullptr) {
  double best = -1.0;
  Index best_v = 0;
  for (Index v = 0; v < pool.size(); ++v) {
    const double r = std::abs(meds[static_cast<std::size_t>(v)] -
                              y.dot(pool.directions[static_cast<std::size_t>(v)]));
    if (r > best) {
      best = r;
      best_v = v;
    }
  }
  if (argmax != nullptr) *argmax = best_v;
  return best;
}

Vector coordinatewise_median(const BlockMeans& means) {
  const Index d = means.means.front().size();
  const Index k = means.n_blocks();
  Vector out(d);
  std::vector<double> col(static_cast<std::size_t>(k));
  for (Index j = 0; j < d; ++j) {
    for (Index b = 0; b < k; ++b)
      col[static_cast<std::size_t>(b)] = means.means[static_cast<std::size_t>(b)][j];
    out[j] = lower_median(col);
  }
  return out;
}

}  // namespace

double mom_objective(const Vector& y, const BlockMeans& means, const DirectionPool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("mom_objective: empty pool");
  if (y.size() != pool.dim || means.means.empty() || means.means.front().size() != pool.dim)
    throw std::invalid_argument("mom_objective: dimension mismatch");
  const auto meds = projection_medians(means, pool);
  return objective_from_medians(y, pool, meds);
}

MeanEstimate lm_mom_estimate(const Dataset& data, Index n_blocks, const DirectionPool& pool,
                             const LmMomOptions& opts, RngStream rng) {
  if (pool.size() == 0) throw std::invalid_argument("lm_mom_estimate: empty pool");
  if (pool.dim != data.dim())
    throw std::invalid_argument("lm_mom_estimate: pool dimension mismatch");
  const BlockPartition part = partition(data.n_samples(), n_blocks, rng);
  const BlockMeans means = block_means(data, part);
  const auto meds = projection_medians(means, pool);

  Vector y = coordinatewise_median(means);
  double best = objective_from_medians(y, pool, meds);
  Vector best_y = y;
  double step = std::max(best, opts.tol);
  // hysteresis keeps accept decisions off rounding knife edges, so the
  // descent path is stable under translations of the data; the step floor
  // sits a decade below tol so any late path divergence stays under it
  const double accept_margin = 1e-10 * (1.0 + best);
  const double step_floor = 0.1 * opts.tol;
  Index iters = 0;
  while (iters < opts.max_iters && best > opts.tol && step > step_floor) {
    ++iters;
    Index v = 0;
    objective_from_medians(y, pool, meds, &v);
    const Vector& dir = pool.directions[static_cast<std::size_t>(v)];
    const double residual = meds[static_cast<std::size_t>(v)] - y.dot(dir);
    const Vector trial = y + step * (residual >= 0.0 ? 1.0 : -1.0) * dir;
    const double obj = objective_from_medians(trial, pool, meds);
    if (obj < best - accept_margin) {
      best = obj;
      y = trial;
      best_y = trial;
    } else {
      step *= opts.step_decay;
    }
  }
  return MeanEstimate{std::move(best_y), best, n_blocks, pool.size(), iters};
}

Vector coordinatewise_mom(const Dataset& data, Index n_blocks, RngStream rng) {
  const BlockPartition part = partition(data.n_samples(), n_blocks, rng);
  return coordinatewise_median(block_means(data, part));
}

Vector geometric_median(const std::vector<Vector>& points, double tol, Index max_iters) {
  if (points.empty()) throw std::invalid_argument("geometric_median: need >= 1 point");
  const Index d = points.front().size();
  const auto n = static_cast<Index>(points.size());
  if (n == 1) return points.front();

  Vector y = Vector::Zero(d);
  for (const Vector& p : points) y += p;
  y /= static_cast<double>(n);
  const double grad_tol = tol * static_cast<double>(n);

  for (Index it = 0; it < max_iters; ++it) {
    // split points into anchors (coinciding with y) and the rest
    Index multiplicity = 0;
    Index anchor = -1;
    Vector pull = Vector::Zero(d);  // sum of unit vectors toward the others
    double inv_dist_sum = 0.0;
    Vector weighted = Vector::Zero(d);
    for (Index i = 0; i < n; ++i) {
      const Vector diff = points[static_cast<std::size_t>(i)] - y;
      const double dist = diff.norm();
      if (dist < 1e-12) {
        ++multiplicity;
        anchor = i;
        continue;
      }
      pull += diff / dist;
      inv_dist_sum += 1.0 / dist;
      weighted += points[static_cast<std::size_t>(i)] / dist;
    }
    if (multiplicity == n) return points[static_cast<std::size_t>(anchor)];
    const double pull_norm = pull.norm();
    if (multiplicity > 0) {
      // subgradient optimality test at a data point
      if (pull_norm <= static_cast<double>(multiplicity))
        return points[static_cast<std::size_t>(anchor)];
      const double move = (pull_norm - static_cast<double>(multiplicity)) / inv_dist_sum;
      y += move * (pull / pull_norm);
      continue;
    }
    if (pull_norm <= grad_tol) return y;
    y = weighted / inv_dist_sum;
  }
  return y;
}

Vector geomedian_mom(const Dataset& data, Index n_blocks, RngStream rng) {
  const BlockPartition part = partition(data.n_samples(), n_blocks, rng);
  return geometric_median(block_means(data, part).means);
}

Vector empirical_mean(const Dataset& data) {
  return data.values.colwise().mean().transpose();
}

double mean_error_bound(const BoundInputs& inputs) {
  if (inputs.n_blocks > inputs.n_samples)
    throw std::invalid_argument("mean_error_bound: K must not exceed N");
  return 8.0 * inputs.r_weak *
         std::sqrt(static_cast<double>(inputs.n_blocks) / static_cast<double>(inputs.n_samples));
}

double r_weak_oracle(const DistributionSpec& sampler, const Vector& mu,
                     const DirectionPool& pool, Index n_mc, RngStream rng) {
  if (n_mc < 1000) throw std::invalid_argument("r_weak_oracle: n_mc must be >= 1000");
  if (pool.size() == 0) throw std::invalid_argument("r_weak_oracle: empty pool");
  const Dataset draws = sample_clean(sampler, n_mc, rng);
  const Matrix centered = draws.values.rowwise() - mu.transpose();
  double best = 0.0;
  for (const Vector& v : pool.directions) {
    const double mean_sq = (centered * v).squaredNorm() / static_cast<double>(n_mc);
    best = std::max(best, mean_sq);
  }
  return std::sqrt(best);
}

}  // namespace robustmom
