#pragma once

// Shared helpers and independent oracles used across the test suites. The
// oracles here deliberately avoid the library's own code paths.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "robustmom/rng.hpp"
#include "robustmom/types.hpp"

namespace test_helpers {

using robustmom::Index;
using robustmom::Matrix;
using robustmom::Vector;

inline double op_norm(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Matrix random_gaussian(Index n, Index d, robustmom::RngStream& rng) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

inline Matrix rotation_2d(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Brute-force halfspace depth in the plane: minimum closed-halfspace count
// over the directions normal to every (x_i - eta) ray plus every pairwise
// angular bisector, each taken in all four quarter-turn orientations.
inline Index brute_force_depth_2d(const std::vector<Vector>& points, const Vector& eta) {
  std::vector<double> angles;
  for (const Vector& p : points) {
    const Vector v = p - eta;
    if (v.squaredNorm() > 0.0) angles.push_back(std::atan2(v[1], v[0]));
  }
  const auto n = static_cast<Index>(points.size());
  if (angles.empty()) return n;

  std::vector<double> candidates;
  const double half_pi = std::asin(1.0);
  for (double a : angles)
    for (double off : {0.0, half_pi, 2.0 * half_pi, 3.0 * half_pi})
      candidates.push_back(a + off);
  for (std::size_t i = 0; i < angles.size(); ++i)
    for (std::size_t j = i + 1; j < angles.size(); ++j) {
      const double bis = 0.5 * (angles[i] + angles[j]);
      for (double off : {0.0, half_pi, 2.0 * half_pi, 3.0 * half_pi})
        candidates.push_back(bis + off);
    }

  Index best = n;
  for (double phi : candidates) {
    Vector u(2);
    u << std::cos(phi), std::sin(phi);
    Index count = 0;
    for (const Vector& p : points)
      if ((p - eta).dot(u) <= 0.0) ++count;
    if (count < best) best = count;
  }
  return best;
}

}  // namespace test_helpers
