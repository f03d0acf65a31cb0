#include "robustmom/types.hpp"

#include <cmath>
#include <stdexcept>

namespace robustmom {

Dataset Dataset::make(Matrix v) {
  if (v.rows() < 1 || v.cols() < 1)
    throw std::invalid_argument("Dataset: need n_samples >= 1 and dim >= 1");
  if (!v.allFinite())
    throw std::invalid_argument("Dataset: entries must be finite");
  return Dataset{std::move(v)};
}

SymMatrix SymMatrix::make(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("SymMatrix: matrix must be square, dim >= 1");
  if (!m.allFinite())
    throw std::invalid_argument("SymMatrix: entries must be finite");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("SymMatrix: input not symmetric within tolerance");
  return SymMatrix{std::move(m)};
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  return a.dot(b);
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("trace_inner: dimension mismatch");
  return a.m.cwiseProduct(b.m).sum();
}

Vector sphere_direction(Index dim, RngStream& rng) {
  Vector v(dim);
  double norm2;
  do {
    for (Index i = 0; i < dim; ++i) v[i] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 < 1e-24);
  return v / std::sqrt(norm2);
}

namespace {

// flip so the first non-negligible component is positive
void canonicalize_sign(Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

bool near_duplicate(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() < 1e-12;
}

void push_unique(std::vector<Vector>& pool, Vector v) {
  canonicalize_sign(v);
  for (const Vector& u : pool)
    if (near_duplicate(u, v)) return;
  pool.push_back(std::move(v));
}

}  // namespace

DirectionPool make_direction_pool(Index dim, Index n_random,
                                  const Dataset* dataset_hint, RngStream rng) {
  if (dim < 1) throw std::invalid_argument("make_direction_pool: dim must be >= 1");
  if (n_random < 0) throw std::invalid_argument("make_direction_pool: n_random must be >= 0");
  DirectionPool pool;
  pool.dim = dim;
  for (Index i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 1.0;
    push_unique(pool.directions, std::move(e));
  }
  for (Index i = 0; i < n_random; ++i)
    push_unique(pool.directions, sphere_direction(dim, rng));
  if (dataset_hint != nullptr && dataset_hint->n_samples() >= 2) {
    if (dataset_hint->dim() != dim)
      throw std::invalid_argument("make_direction_pool: dataset_hint dim mismatch");
    const auto n = static_cast<std::uint64_t>(dataset_hint->n_samples());
    for (int pair = 0; pair < 50; ++pair) {
      const auto i = rng.uniform_below(n);
      const auto j = rng.uniform_below(n);
      if (i == j) continue;
      Vector diff = dataset_hint->values.row(static_cast<Index>(i)) -
                    dataset_hint->values.row(static_cast<Index>(j));
      const double norm = diff.norm();
      if (norm < 1e-12) continue;  // degenerate pair
      push_unique(pool.directions, diff / norm);
    }
  }
  return pool;
}

}  // namespace robustmom
