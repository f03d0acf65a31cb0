#pragma once

#include <span>
#include <vector>

#include "robustmom/types.hpp"

namespace robustmom {

/// K disjoint blocks of equal size m = floor(N/K); the N - K*m leftover
/// indices are discarded, never folded into a block.
struct BlockPartition {
  Index n_blocks = 0;
  Index block_size = 0;
  std::vector<std::vector<Index>> assignments;
  std::vector<Index> discarded;
};

struct BlockMeans {
  std::vector<Vector> means;

  Index n_blocks() const { return static_cast<Index>(means.size()); }
};

struct BlockMoments {
  std::vector<SymMatrix> moments;

  Index n_blocks() const { return static_cast<Index>(moments.size()); }
};

/// Random permutation split into K consecutive runs of m.
BlockPartition partition(Index n_samples, Index n_blocks, RngStream rng);

/// Identity-permutation split; deterministic counterpart used by tests.
BlockPartition partition_sequential(Index n_samples, Index n_blocks);

BlockMeans block_means(const Dataset& data, const BlockPartition& part);

/// Per-block second-moment matrices (1/m) sum (X_i - c)(X_i - c)^T with
/// c = center or zero; zero center reproduces the raw X (x) X construction.
BlockMoments block_second_moments(const Dataset& data, const BlockPartition& part,
                                  const Vector* center = nullptr);

/// Smallest x_i with #{x_j <= x_i} >= n/2 and #{x_j >= x_i} >= n/2, i.e. the
/// ceil(n/2)-th order statistic (lower of the two middle values for even n).
double lower_median(std::span<const double> values);

/// K = min(floor(N/2), max(ceil(128 ln(1/delta)), c_vc*(d+1), c_out*|O|, 1)).
/// Throws when N is too small to form a single block.
Index choose_block_count(double delta, Index dim, Index corrupt_count,
                         Index n_samples, double c_vc = 4.0, double c_out = 16.0);

}  // namespace robustmom
