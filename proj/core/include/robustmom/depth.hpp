#pragma once

#include <span>
#include <string>
#include <vector>

#include "robustmom/types.hpp"

namespace robustmom {

/// Halfspace depth of a point: the direction minimizing #{i : <x_i - eta, u> <= 0}.
struct DepthResult {
  Index depth = 0;
  double depth_fraction = 0.0;
  Vector witness_direction;
};

/// depth = min(#{x_i <= eta}, #{x_i >= eta}); witness is the minimizing sign.
DepthResult depth_1d(std::span<const double> points, double eta);

/// Exact infimum over all directions in the plane. Candidate directions are
/// the midpoints of the angular intervals cut by the directions perpendicular
/// to each (x_i - eta); the closed-halfspace count is piecewise constant with
/// those breakpoints and never dips below the interval values at a breakpoint,
/// so scanning interval interiors attains the infimum. O(n log n).
DepthResult depth_exact_2d(const std::vector<Vector>& points, const Vector& eta);

/// Min over n_dirs uniform sphere directions and their negations; an upper
/// bound on the true depth.
DepthResult depth_randomized(const std::vector<Vector>& points, const Vector& eta,
                             Index n_dirs, RngStream rng);

enum class DepthMethod { exact1d, exact2d, randomized };

std::string to_string(DepthMethod m);

struct TukeyMomEstimate {
  Vector point;
  Index depth = 0;  // with respect to the K block means
  Index n_blocks = 0;
  DepthMethod method = DepthMethod::randomized;
  Index candidates_evaluated = 0;
  /// Direction set used by every randomized evaluation in the search; empty
  /// for the exact methods. Kept so the depth certificate can be re-checked.
  std::vector<Vector> direction_set;
};

struct TukeyMomOptions {
  Index n_dirs = 512;        // randomized depth only
  Index n_anneal_iters = 200;  // cap on coordinate-refinement sweeps
};

/// Deepest point among the block means, the coordinate-wise and geometric
/// medians of the block means, and coordinate-wise line-search refinements
/// over midpoints of projected block-mean gaps. Depth is exact for d <= 2 and
/// randomized (shared fixed direction set) otherwise.
TukeyMomEstimate tukey_mom(const Dataset& data, Index n_blocks, RngStream rng,
                           const TukeyMomOptions& opts = {});

/// Depth of eta with respect to `points` using the stored direction set /
/// method of an estimate; re-evaluates a certificate.
Index depth_with_method(const std::vector<Vector>& points, const Vector& eta,
                        DepthMethod method, const std::vector<Vector>& direction_set);

/// sqrt(8 d) * R * sqrt(K/N).
double tukey_error_bound(double r_weak, Index n_blocks, Index n_samples, Index dim);

/// True iff at least (alpha-1)/alpha * K of the block statistics are false.
bool block_majority_check(const std::vector<bool>& block_stats, double alpha);

}  // namespace robustmom
