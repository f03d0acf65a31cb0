#include "robustmom/contamination.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace robustmom {

namespace {

void check_params(const DistributionSpec& spec) {
  if (spec.dim < 1) throw std::invalid_argument("DistributionSpec: dim must be >= 1");
  if (spec.mean.size() != spec.dim)
    throw std::invalid_argument("DistributionSpec: mean dimension mismatch");
  switch (spec.kind) {
    case DistKind::gaussian:
    case DistKind::student_t:
      if (spec.scale.dim() != spec.dim)
        throw std::invalid_argument("DistributionSpec: scale dimension mismatch");
      if (spec.kind == DistKind::student_t && !(spec.df > 2.0))
        throw std::invalid_argument("DistributionSpec: student_t needs df > 2");
      break;
    case DistKind::pareto:
      if (!(spec.tail_index > 2.0))
        throw std::invalid_argument("DistributionSpec: pareto needs tail_index > 2");
      break;
    case DistKind::lognormal:
      if (!(spec.log_sigma > 0.0))
        throw std::invalid_argument("DistributionSpec: lognormal needs log_sigma > 0");
      break;
    case DistKind::point_mass:
      break;
  }
}

// symmetric PSD square root; tolerates tiny negative eigenvalues
Matrix psd_sqrt(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s.m + s.m.transpose()));
  Vector lam = es.eigenvalues();
  const double floor_tol = -1e-9 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < floor_tol)
      throw std::invalid_argument("sample_clean: scale matrix is not PSD");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

DistributionSpec DistributionSpec::gaussian_spec(Vector mean, SymMatrix scale) {
  DistributionSpec s;
  s.kind = DistKind::gaussian;
  s.dim = mean.size();
  s.mean = std::move(mean);
  s.scale = std::move(scale);
  check_params(s);
  return s;
}

DistributionSpec DistributionSpec::student_t_spec(Vector mean, SymMatrix scale, double df) {
  DistributionSpec s;
  s.kind = DistKind::student_t;
  s.dim = mean.size();
  s.mean = std::move(mean);
  s.scale = std::move(scale);
  s.df = df;
  check_params(s);
  return s;
}

DistributionSpec DistributionSpec::pareto_spec(Index dim, Vector mean, double tail_index) {
  DistributionSpec s;
  s.kind = DistKind::pareto;
  s.dim = dim;
  s.mean = std::move(mean);
  s.scale = SymMatrix::identity(dim);
  s.tail_index = tail_index;
  check_params(s);
  return s;
}

DistributionSpec DistributionSpec::lognormal_spec(Index dim, Vector mean, double log_sigma) {
  DistributionSpec s;
  s.kind = DistKind::lognormal;
  s.dim = dim;
  s.mean = std::move(mean);
  s.scale = SymMatrix::identity(dim);
  s.log_sigma = log_sigma;
  check_params(s);
  return s;
}

DistributionSpec DistributionSpec::point_mass_spec(Vector mean) {
  DistributionSpec s;
  s.kind = DistKind::point_mass;
  s.dim = mean.size();
  s.mean = std::move(mean);
  s.scale = SymMatrix::zero(s.dim);
  check_params(s);
  return s;
}

SymMatrix DistributionSpec::covariance() const {
  switch (kind) {
    case DistKind::gaussian:
    case DistKind::student_t:
      return scale;  // student_t normalized to the requested second moment
    case DistKind::point_mass:
      return SymMatrix::zero(dim);
    case DistKind::pareto: {
      const double a = tail_index;
      const double var = a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
      return SymMatrix{var * Matrix::Identity(dim, dim)};
    }
    case DistKind::lognormal: {
      const double s2 = log_sigma * log_sigma;
      const double var = (std::exp(s2) - 1.0) * std::exp(s2);
      return SymMatrix{var * Matrix::Identity(dim, dim)};
    }
  }
  throw std::logic_error("DistributionSpec: unknown kind");
}

Dataset sample_clean(const DistributionSpec& spec, Index n, RngStream rng) {
  check_params(spec);
  if (n < 1) throw std::invalid_argument("sample_clean: n must be >= 1");
  const Index d = spec.dim;
  Matrix out(n, d);
  switch (spec.kind) {
    case DistKind::point_mass: {
      out = spec.mean.transpose().replicate(n, 1);
      break;
    }
    case DistKind::gaussian: {
      const Matrix f = psd_sqrt(spec.scale);
      Vector z(d);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) z[j] = rng.normal();
        out.row(i) = (spec.mean + f * z).transpose();
      }
      break;
    }
    case DistKind::student_t: {
      const Matrix f = psd_sqrt(spec.scale);
      const double norm = std::sqrt((spec.df - 2.0) / spec.df);
      Vector z(d);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) z[j] = rng.normal();
        const double w = rng.chi_squared(spec.df);
        const double mult = norm * std::sqrt(spec.df / w);
        out.row(i) = (spec.mean + mult * (f * z)).transpose();
      }
      break;
    }
    case DistKind::pareto: {
      const double a = spec.tail_index;
      const double pareto_mean = a / (a - 1.0);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) {
          const double u = 1.0 - rng.uniform01();  // in (0, 1]
          out(i, j) = spec.mean[j] + std::pow(u, -1.0 / a) - pareto_mean;
        }
      break;
    }
    case DistKind::lognormal: {
      const double ln_mean = std::exp(0.5 * spec.log_sigma * spec.log_sigma);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j)
          out(i, j) = spec.mean[j] + std::exp(spec.log_sigma * rng.normal()) - ln_mean;
      break;
    }
  }
  return Dataset::make(std::move(out));
}

ContaminatedSample huber_contaminate(const Dataset& clean, double eps,
                                     const DistributionSpec& q_spec, RngStream rng) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("huber_contaminate: eps must be in [0,1)");
  if (q_spec.dim != clean.dim())
    throw std::invalid_argument("huber_contaminate: q_spec dimension mismatch");
  ContaminatedSample out;
  out.data = Dataset::make(clean.values);
  out.clean_reference = Dataset::make(clean.values);
  RngStream qrng = rng.derive(1);
  for (Index i = 0; i < clean.n_samples(); ++i) {
    if (rng.uniform01() < eps) {
      const Dataset draw = sample_clean(q_spec, 1, qrng.derive(static_cast<std::uint64_t>(i)));
      out.data.values.row(i) = draw.values.row(0);
      out.outlier_indices.push_back(i);
    }
  }
  return out;
}

ContaminatedSample adversarial_corrupt(const Dataset& clean, double eps,
                                       AdversarialStrategy strategy, double magnitude,
                                       const Vector* target_estimator_hint,
                                       const BlockPartition* partition_hint,
                                       RngStream rng) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("adversarial_corrupt: eps must be in [0,1)");
  const Index n = clean.n_samples();
  const Index d = clean.dim();
  // 1e-9 guard keeps floor(eps*N) exact when eps*N lands on an integer
  const auto n_out = static_cast<Index>(std::floor(eps * static_cast<double>(n) + 1e-9));

  ContaminatedSample out;
  out.data = Dataset::make(clean.values);
  out.clean_reference = Dataset::make(clean.values);
  if (n_out == 0) return out;

  std::vector<Index> targets;
  targets.reserve(static_cast<std::size_t>(n_out));
  if (strategy == AdversarialStrategy::block_concentrated && partition_hint != nullptr) {
    // fully corrupt as many blocks as the budget allows
    const Index m = partition_hint->block_size;
    std::vector<Index> block_order(partition_hint->assignments.size());
    std::iota(block_order.begin(), block_order.end(), Index{0});
    for (Index i = static_cast<Index>(block_order.size()) - 1; i > 0; --i) {
      const auto j = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(block_order[static_cast<std::size_t>(i)], block_order[static_cast<std::size_t>(j)]);
    }
    const Index full_blocks = (m > 0) ? n_out / m : 0;
    Index taken = 0;
    for (Index b = 0; b < full_blocks && b < static_cast<Index>(block_order.size()); ++b)
      for (Index idx : partition_hint->assignments[static_cast<std::size_t>(block_order[static_cast<std::size_t>(b)])]) {
        targets.push_back(idx);
        ++taken;
      }
    // spread the remainder into the next block
    for (std::size_t b = static_cast<std::size_t>(full_blocks);
         taken < n_out && b < block_order.size(); ++b)
      for (Index idx : partition_hint->assignments[static_cast<std::size_t>(block_order[b])]) {
        if (taken >= n_out) break;
        targets.push_back(idx);
        ++taken;
      }
  } else {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    targets.assign(perm.begin(), perm.begin() + n_out);
  }

  const Vector ones_dir = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  Vector anchor;
  if (target_estimator_hint != nullptr) {
    if (target_estimator_hint->size() != d)
      throw std::invalid_argument("adversarial_corrupt: hint dimension mismatch");
    anchor = *target_estimator_hint;
  } else {
    anchor = clean.values.colwise().mean().transpose();
  }
  const Vector far_value = anchor + magnitude * ones_dir;

  for (Index idx : targets) {
    switch (strategy) {
      case AdversarialStrategy::far_point_mass:
      case AdversarialStrategy::block_concentrated:
        out.data.values.row(idx) = far_value.transpose();
        break;
      case AdversarialStrategy::mean_shift:
        out.data.values.row(idx) =
            clean.values.row(idx) + magnitude * ones_dir.transpose();
        break;
    }
  }
  std::sort(targets.begin(), targets.end());
  out.outlier_indices = std::move(targets);
  return out;
}

}  // namespace robustmom
