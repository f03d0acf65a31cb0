#pragma once

#include <vector>

#include "robustmom/blocking.hpp"
#include "robustmom/contamination.hpp"
#include "robustmom/types.hpp"

namespace robustmom {

struct MeanEstimate {
  Vector point;
  double achieved_eps = 0.0;  // max over pool of |median projection - projection at point|
  Index n_blocks = 0;
  Index pool_size = 0;
  Index iterations = 0;
};

/// Inputs of the concentration bound 8 R sqrt(K/N); r_weak is the square root
/// of the largest directional second moment.
struct BoundInputs {
  double r_weak = 0.0;
  Index n_blocks = 0;
  Index n_samples = 0;
  Index dim = 0;
};

struct LmMomOptions {
  Index max_iters = 500;
  double step_decay = 0.5;
  double tol = 1e-8;
};

/// max over pool directions v of |Med_k <Xbar_k, v>  -  <y, v>|.
double mom_objective(const Vector& y, const BlockMeans& means, const DirectionPool& pool);

/// Minimizes mom_objective by subgradient descent with step halving,
/// initialized at the coordinate-wise median of the block means. achieved_eps
/// is the best objective seen and never exceeds the objective at the
/// initializer.
MeanEstimate lm_mom_estimate(const Dataset& data, Index n_blocks, const DirectionPool& pool,
                             const LmMomOptions& opts, RngStream rng);

/// Component j = lower median over blocks of (Xbar_k)_j; one shared partition.
Vector coordinatewise_mom(const Dataset& data, Index n_blocks, RngStream rng);

/// Weiszfeld iteration with the standard anchor handling when an iterate
/// lands on a data point.
Vector geometric_median(const std::vector<Vector>& points, double tol = 1e-9,
                        Index max_iters = 1000);

/// Geometric median of the K block means.
Vector geomedian_mom(const Dataset& data, Index n_blocks, RngStream rng);

Vector empirical_mean(const Dataset& data);

/// 8 * R * sqrt(K/N).
double mean_error_bound(const BoundInputs& inputs);

/// Monte Carlo estimate of R = sup_v sqrt(E <Y - mu, v>^2) over the pool.
double r_weak_oracle(const DistributionSpec& sampler, const Vector& mu,
                     const DirectionPool& pool, Index n_mc, RngStream rng);

}  // namespace robustmom
