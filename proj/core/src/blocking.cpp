#include "robustmom/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace robustmom {

namespace {

BlockPartition split_permutation(std::vector<Index> perm, Index n_blocks) {
  const auto n = static_cast<Index>(perm.size());
  const Index m = n / n_blocks;
  BlockPartition part;
  part.n_blocks = n_blocks;
  part.block_size = m;
  part.assignments.resize(static_cast<std::size_t>(n_blocks));
  for (Index k = 0; k < n_blocks; ++k) {
    auto first = perm.begin() + k * m;
    part.assignments[static_cast<std::size_t>(k)].assign(first, first + m);
  }
  part.discarded.assign(perm.begin() + n_blocks * m, perm.end());
  return part;
}

}  // namespace

BlockPartition partition(Index n_samples, Index n_blocks, RngStream rng) {
  if (n_blocks < 1 || n_blocks > n_samples)
    throw std::invalid_argument("partition: need 1 <= K <= N");
  std::vector<Index> perm(static_cast<std::size_t>(n_samples));
  std::iota(perm.begin(), perm.end(), Index{0});
  // Fisher-Yates with the stream's own uniform draws
  for (Index i = n_samples - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return split_permutation(std::move(perm), n_blocks);
}

BlockPartition partition_sequential(Index n_samples, Index n_blocks) {
  if (n_blocks < 1 || n_blocks > n_samples)
    throw std::invalid_argument("partition: need 1 <= K <= N");
  std::vector<Index> perm(static_cast<std::size_t>(n_samples));
  std::iota(perm.begin(), perm.end(), Index{0});
  return split_permutation(std::move(perm), n_blocks);
}

BlockMeans block_means(const Dataset& data, const BlockPartition& part) {
  const Index d = data.dim();
  BlockMeans out;
  out.means.reserve(part.assignments.size());
  for (const auto& block : part.assignments) {
    Vector sum = Vector::Zero(d);
    for (Index idx : block) {
      if (idx < 0 || idx >= data.n_samples())
        throw std::out_of_range("block_means: partition index out of range");
      sum += data.values.row(idx).transpose();
    }
    out.means.push_back(sum / static_cast<double>(block.size()));
  }
  return out;
}

BlockMoments block_second_moments(const Dataset& data, const BlockPartition& part,
                                  const Vector* center) {
  const Index d = data.dim();
  if (center != nullptr && center->size() != d)
    throw std::invalid_argument("block_second_moments: center dimension mismatch");
  BlockMoments out;
  out.moments.reserve(part.assignments.size());
  for (const auto& block : part.assignments) {
    Matrix acc = Matrix::Zero(d, d);
    for (Index idx : block) {
      if (idx < 0 || idx >= data.n_samples())
        throw std::out_of_range("block_second_moments: partition index out of range");
      Vector x = data.values.row(idx).transpose();
      if (center != nullptr) x -= *center;
      acc.noalias() += x * x.transpose();
    }
    acc /= static_cast<double>(block.size());
    out.moments.push_back(SymMatrix{std::move(acc)});
  }
  return out;
}

double lower_median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("lower_median: empty input");
  std::vector<double> buf(values.begin(), values.end());
  const auto n = buf.size();
  const auto k = (n + 1) / 2 - 1;  // 0-based rank of the ceil(n/2)-th order stat
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end());
  return buf[k];
}

Index choose_block_count(double delta, Index dim, Index corrupt_count,
                         Index n_samples, double c_vc, double c_out) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("choose_block_count: delta must be in (0,1)");
  if (corrupt_count < 0)
    throw std::invalid_argument("choose_block_count: corrupt_count must be >= 0");
  if (dim < 1) throw std::invalid_argument("choose_block_count: dim must be >= 1");
  // 1e-9 guard absorbs rounding in the log before ceil
  const double conf_term = std::ceil(128.0 * std::log(1.0 / delta) - 1e-9);
  double want = std::max({conf_term, c_vc * static_cast<double>(dim + 1),
                          c_out * static_cast<double>(corrupt_count), 1.0});
  const auto cap = n_samples / 2;
  const Index k = std::min<Index>(cap, static_cast<Index>(want));
  if (k < 1 || n_samples / k < 1)
    throw std::invalid_argument(
        "choose_block_count: insufficient samples for requested confidence");
  return k;
}

}  // namespace robustmom
