#pragma once

#include <Eigen/Core>
#include <vector>

#include "robustmom/rng.hpp"

namespace robustmom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// N samples in d dimensions, one row per sample. All entries finite.
struct Dataset {
  Matrix values;  // N x d

  Index n_samples() const { return values.rows(); }
  Index dim() const { return values.cols(); }

  /// Validates shape and finiteness; throws std::invalid_argument.
  static Dataset make(Matrix v);
};

/// Symmetric d x d matrix. Construction checks symmetry to 1e-12 relative
/// to the largest absolute entry.
struct SymMatrix {
  Matrix m;

  Index dim() const { return m.rows(); }

  static SymMatrix make(Matrix m);
  static SymMatrix zero(Index d) { return SymMatrix{Matrix::Zero(d, d)}; }
  static SymMatrix identity(Index d) { return SymMatrix{Matrix::Identity(d, d)}; }
};

/// Finite set of unit directions standing in for the extreme points of the
/// dual unit ball. Deduplicated up to sign: v and -v are interchangeable
/// because every consumer takes |<.,v>| or scans both signs.
struct DirectionPool {
  Index dim = 0;
  std::vector<Vector> directions;

  Index size() const { return static_cast<Index>(directions.size()); }
};

double dot(const Vector& a, const Vector& b);

/// Entrywise inner product sum_ij a_ij b_ij (= Tr(a^T b)).
double trace_inner(const SymMatrix& a, const SymMatrix& b);

/// Builds a pool from (a) the d coordinate axes, (b) n_random uniform sphere
/// draws, (c) when dataset_hint is given, normalized differences of up to 50
/// random row pairs. Differences with norm < 1e-12 are skipped; the result is
/// sign-canonicalized and deduplicated.
DirectionPool make_direction_pool(Index dim, Index n_random,
                                  const Dataset* dataset_hint, RngStream rng);

/// Uniform direction on the unit sphere in R^d.
Vector sphere_direction(Index dim, RngStream& rng);

}  // namespace robustmom
