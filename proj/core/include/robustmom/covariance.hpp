#pragma once

#include <optional>
#include <vector>

#include "robustmom/blocking.hpp"
#include "robustmom/contamination.hpp"
#include "robustmom/types.hpp"

namespace robustmom {

struct CovEstimate {
  SymMatrix matrix;             // final estimate (PSD-projected when enabled)
  SymMatrix raw_matrix;         // optimizer output before projection
  double achieved_eps = 0.0;    // recomputed after projection
  bool centered = false;
  std::optional<Vector> mean_used;
  Index n_blocks = 0;
  bool psd_projected = false;
  Index iterations = 0;
};

enum class CovCenter { none, mom_mean };

struct CovMomOptions {
  CovCenter center = CovCenter::none;
  bool psd_project = true;
  Index max_iters = 500;
  double tol = 1e-8;
};

/// max over pool directions u of |Med_k(u^T M_k u) - u^T Y u|.
double cov_objective(const SymMatrix& y, const BlockMoments& moments,
                     const DirectionPool& pool);

/// Minimizes cov_objective over symmetric Y by subgradient steps along u (x) u,
/// initialized at the entrywise lower median of the block moments. With
/// center = mom_mean the blocks are built from rows recentered at the robust
/// mean estimate.
CovEstimate cov_mom_estimate(const Dataset& data, Index n_blocks, const DirectionPool& pool,
                             const CovMomOptions& opts, RngStream rng);

/// 8 * sigma * sqrt(K/N).
double cov_error_bound(double sigma, Index n_blocks, Index n_samples);

/// Monte Carlo estimate of sigma = sup_u sqrt(E (u^T Sigma u - (u^T Y)^2)^2).
/// The sampler must have finite fourth moments (student_t needs df > 4).
double sigma_weak_oracle(const DistributionSpec& sampler, const SymMatrix& true_second_moment,
                         const DirectionPool& pool, Index n_mc, RngStream rng);

struct EigenDecomposition {
  Vector eigvals;  // non-increasing
  Matrix eigvecs;  // orthonormal columns, eigvecs.col(j) pairs with eigvals[j]
};

EigenDecomposition sym_eigendecomposition(const SymMatrix& a);

struct PcaResult {
  SymMatrix projector;  // rank-k orthogonal projector onto the top eigenspace
  Vector eigvals;       // full estimated spectrum, descending
  Index k = 0;
  double gap = 0.0;  // lambda_k - lambda_{k+1} of the estimated spectrum
  std::optional<double> bound;  // (8/gap) * sigma_hint * sqrt(K/N)
  std::optional<bool> gap_ok;   // gap >= 16 * sigma_hint * sqrt(K/N)
};

/// Robust PCA: centered, PSD-projected covariance MOM estimate followed by an
/// eigendecomposition; returns the top-k projector and the spectral gap.
PcaResult robust_pca(const Dataset& data, Index n_blocks, Index k, const DirectionPool& pool,
                     std::optional<double> sigma_hint, RngStream rng);

double frobenius_error(const SymMatrix& a, const SymMatrix& b);

}  // namespace robustmom
