#include "robustmom/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robustmom/blocking.hpp"
#include "robustmom/mean.hpp"

namespace robustmom {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Index count_inside(const std::vector<Vector>& points, const Vector& eta, const Vector& u) {
  Index c = 0;
  for (const Vector& p : points)
    if ((p - eta).dot(u) <= 0.0) ++c;
  return c;
}

}  // namespace

DepthResult depth_1d(std::span<const double> points, double eta) {
  if (points.empty()) throw std::invalid_argument("depth_1d: empty input");
  Index le = 0, ge = 0;
  for (double x : points) {
    if (x <= eta) ++le;
    if (x >= eta) ++ge;
  }
  Vector witness(1);
  Index depth;
  if (le <= ge) {
    depth = le;
    witness[0] = 1.0;
  } else {
    depth = ge;
    witness[0] = -1.0;
  }
  return DepthResult{depth, static_cast<double>(depth) / static_cast<double>(points.size()),
                     std::move(witness)};
}

DepthResult depth_exact_2d(const std::vector<Vector>& points, const Vector& eta) {
  if (eta.size() != 2) throw std::invalid_argument("depth_exact_2d: eta must be 2-D");
  if (points.empty()) throw std::invalid_argument("depth_exact_2d: empty input");
  const auto n = static_cast<Index>(points.size());

  std::vector<double> angles;  // of the nonzero x_i - eta
  angles.reserve(points.size());
  for (const Vector& p : points) {
    if (p.size() != 2) throw std::invalid_argument("depth_exact_2d: points must be 2-D");
    const Vector v = p - eta;
    if (v.squaredNorm() > 0.0) {
      double a = std::atan2(v[1], v[0]);
      if (a < 0.0) a += kTwoPi;
      angles.push_back(a);
    }
  }
  if (angles.empty()) {
    Vector e1(2);
    e1 << 1.0, 0.0;
    return DepthResult{n, 1.0, std::move(e1)};
  }
  std::sort(angles.begin(), angles.end());

  // arc-endpoint events for psi, where count(psi) = #{theta in [psi, psi+pi]}
  std::vector<double> events;
  events.reserve(2 * angles.size());
  for (double a : angles) {
    events.push_back(a);
    events.push_back(std::fmod(a + M_PI, kTwoPi));
  }
  std::sort(events.begin(), events.end());

  const auto arc_count = [&](double psi) -> Index {
    // #{theta in [psi, psi+pi]} with wraparound
    double hi = psi + M_PI;
    const auto lo_it = std::lower_bound(angles.begin(), angles.end(), psi);
    if (hi <= kTwoPi) {
      const auto hi_it = std::upper_bound(angles.begin(), angles.end(), hi);
      return static_cast<Index>(hi_it - lo_it);
    }
    hi -= kTwoPi;
    const auto wrap_it = std::upper_bound(angles.begin(), angles.end(), hi);
    return static_cast<Index>((angles.end() - lo_it) + (wrap_it - angles.begin()));
  };

  Index best = n + 1;
  double best_psi = 0.0;
  const auto m = events.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double a = events[i];
    const double b = (i + 1 < m) ? events[i + 1] : events[0] + kTwoPi;
    if (b - a < 1e-15) continue;  // zero-width piece
    double mid = 0.5 * (a + b);
    if (mid >= kTwoPi) mid -= kTwoPi;
    const Index c = arc_count(mid);
    if (c < best) {
      best = c;
      best_psi = mid;
    }
  }

  const double phi = best_psi - 0.5 * M_PI;
  Vector witness(2);
  witness << std::cos(phi), std::sin(phi);
  // report the dot-product recount so the witness certificate is self-consistent
  const Index depth = count_inside(points, eta, witness);
  return DepthResult{depth, static_cast<double>(depth) / static_cast<double>(n),
                     std::move(witness)};
}

DepthResult depth_randomized(const std::vector<Vector>& points, const Vector& eta,
                             Index n_dirs, RngStream rng) {
  if (n_dirs < 1) throw std::invalid_argument("depth_randomized: n_dirs must be >= 1");
  if (points.empty()) throw std::invalid_argument("depth_randomized: empty input");
  const auto n = static_cast<Index>(points.size());
  const Index d = eta.size();
  Index best = n + 1;
  Vector best_u = Vector::Zero(d);
  for (Index t = 0; t < n_dirs; ++t) {
    const Vector u = sphere_direction(d, rng);
    Index le = 0, ge = 0;
    for (const Vector& p : points) {
      const double s = (p - eta).dot(u);
      if (s <= 0.0) ++le;
      if (s >= 0.0) ++ge;
    }
    if (le < best) {
      best = le;
      best_u = u;
    }
    if (ge < best) {
      best = ge;
      best_u = -u;
    }
  }
  return DepthResult{best, static_cast<double>(best) / static_cast<double>(n),
                     std::move(best_u)};
}

std::string to_string(DepthMethod m) {
  switch (m) {
    case DepthMethod::exact1d: return "exact1d";
    case DepthMethod::exact2d: return "exact2d";
    case DepthMethod::randomized: return "randomized";
  }
  return "unknown";
}

Index depth_with_method(const std::vector<Vector>& points, const Vector& eta,
                        DepthMethod method, const std::vector<Vector>& direction_set) {
  switch (method) {
    case DepthMethod::exact1d: {
      std::vector<double> xs(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) xs[i] = points[i][0];
      return depth_1d(xs, eta[0]).depth;
    }
    case DepthMethod::exact2d:
      return depth_exact_2d(points, eta).depth;
    case DepthMethod::randomized: {
      const auto n = static_cast<Index>(points.size());
      Index best = n;
      for (const Vector& u : direction_set) {
        Index le = 0, ge = 0;
        for (const Vector& p : points) {
          const double s = (p - eta).dot(u);
          if (s <= 0.0) ++le;
          if (s >= 0.0) ++ge;
        }
        best = std::min({best, le, ge});
      }
      return best;
    }
  }
  throw std::logic_error("depth_with_method: unknown method");
}

TukeyMomEstimate tukey_mom(const Dataset& data, Index n_blocks, RngStream rng,
                           const TukeyMomOptions& opts) {
  const BlockPartition part = partition(data.n_samples(), n_blocks, rng);
  const BlockMeans means = block_means(data, part);
  const Index d = data.dim();

  TukeyMomEstimate est;
  est.n_blocks = n_blocks;
  est.method = (d == 1)   ? DepthMethod::exact1d
               : (d == 2) ? DepthMethod::exact2d
                          : DepthMethod::randomized;
  if (est.method == DepthMethod::randomized) {
    // axes first so the axis-rank pruning bound below stays valid
    est.direction_set.reserve(static_cast<std::size_t>(opts.n_dirs + d));
    for (Index j = 0; j < d; ++j) {
      Vector e = Vector::Zero(d);
      e[j] = 1.0;
      est.direction_set.push_back(std::move(e));
    }
    for (Index t = 0; t < opts.n_dirs; ++t)
      est.direction_set.push_back(sphere_direction(d, rng));
  }

  const auto eval = [&](const Vector& eta) -> Index {
    ++est.candidates_evaluated;
    return depth_with_method(means.means, eta, est.method, est.direction_set);
  };

  // sorted block-mean coordinates, for the axis-rank depth upper bound
  std::vector<std::vector<double>> sorted_cols(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) {
    auto& col = sorted_cols[static_cast<std::size_t>(j)];
    col.resize(static_cast<std::size_t>(n_blocks));
    for (Index k = 0; k < n_blocks; ++k)
      col[static_cast<std::size_t>(k)] = means.means[static_cast<std::size_t>(k)][j];
    std::sort(col.begin(), col.end());
  }
  // depth along axis j alone; the true depth can only be smaller
  const auto axis_bound_coord = [&](Index j, double value) -> Index {
    const auto& col = sorted_cols[static_cast<std::size_t>(j)];
    const auto le = std::upper_bound(col.begin(), col.end(), value) - col.begin();
    const auto ge = col.end() - std::lower_bound(col.begin(), col.end(), value);
    return static_cast<Index>(std::min(le, ge));
  };
  const auto axis_bound = [&](const Vector& p) -> Index {
    Index bound = n_blocks;
    for (Index j = 0; j < d; ++j) bound = std::min(bound, axis_bound_coord(j, p[j]));
    return bound;
  };

  // candidate scan; ties keep the earliest, so the coordinate-wise median
  // wins whenever nothing is strictly deeper (this makes d=1 return the
  // lower median of block means exactly)
  Vector coord_med(d);
  for (Index j = 0; j < d; ++j) {
    const Index rank = (n_blocks + 1) / 2 - 1;
    coord_med[j] = sorted_cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(rank)];
  }
  Vector best_pt = coord_med;
  Index best_depth = eval(best_pt);

  const Vector geo = geometric_median(means.means);
  if (axis_bound(geo) > best_depth)
    if (const Index dep = eval(geo); dep > best_depth) {
      best_depth = dep;
      best_pt = geo;
    }
  for (const Vector& bm : means.means) {
    if (axis_bound(bm) <= best_depth) continue;
    if (const Index dep = eval(bm); dep > best_depth) {
      best_depth = dep;
      best_pt = bm;
    }
  }

  // coordinate-wise line search over midpoints of projected block-mean gaps;
  // only gaps whose axis ranks could beat the incumbent are evaluated
  for (Index sweep = 0; sweep < opts.n_anneal_iters; ++sweep) {
    bool improved = false;
    for (Index j = 0; j < d; ++j) {
      Index other_bound = n_blocks;
      for (Index jj = 0; jj < d; ++jj)
        if (jj != j) other_bound = std::min(other_bound, axis_bound_coord(jj, best_pt[jj]));
      if (other_bound <= best_depth) continue;
      const auto& col = sorted_cols[static_cast<std::size_t>(j)];
      Vector trial = best_pt;
      const Index k_lo = best_depth;  // need min(k+1, K-k-1) > best_depth
      const Index k_hi = n_blocks - best_depth - 2;
      for (Index k = k_lo; k <= k_hi; ++k) {
        const double lo = col[static_cast<std::size_t>(k)];
        const double hi = col[static_cast<std::size_t>(k) + 1];
        if (hi <= lo) continue;
        trial[j] = 0.5 * (lo + hi);
        if (const Index dep = eval(trial); dep > best_depth) {
          best_depth = dep;
          best_pt = trial;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  est.point = best_pt;
  est.depth = best_depth;
  return est;
}

double tukey_error_bound(double r_weak, Index n_blocks, Index n_samples, Index dim) {
  if (n_blocks < 1 || n_samples < n_blocks || dim < 1 || r_weak < 0.0)
    throw std::invalid_argument("tukey_error_bound: invalid arguments");
  return std::sqrt(8.0 * static_cast<double>(dim)) * r_weak *
         std::sqrt(static_cast<double>(n_blocks) / static_cast<double>(n_samples));
}

bool block_majority_check(const std::vector<bool>& block_stats, double alpha) {
  if (block_stats.empty()) throw std::invalid_argument("block_majority_check: K must be >= 1");
  if (!(alpha > 1.0)) throw std::invalid_argument("block_majority_check: alpha must be > 1");
  const auto k = static_cast<double>(block_stats.size());
  const auto n_false = static_cast<double>(
      std::count(block_stats.begin(), block_stats.end(), false));
  return n_false >= (alpha - 1.0) / alpha * k - 1e-9;
}

}  // namespace robustmom
