#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robustmom/blocking.hpp"
#include "robustmom/types.hpp"

namespace robustmom {

enum class DistKind { gaussian, student_t, pareto, lognormal, point_mass };

/// Clean-data generator description. student_t and gaussian draws are scaled
/// so the second-moment matrix equals `scale` (for student_t this multiplies
/// by sqrt((df-2)/df)); pareto/lognormal are coordinate-wise independent with
/// unit-free shape parameters, shifted to the requested mean.
struct DistributionSpec {
  DistKind kind = DistKind::gaussian;
  Index dim = 1;
  Vector mean;        // defaults to zero
  SymMatrix scale;    // gaussian / student_t second-moment target
  double df = 3.0;          // student_t, must be > 2
  double tail_index = 3.0;  // pareto, must be > 2
  double log_sigma = 1.0;   // lognormal log-scale sd

  static DistributionSpec gaussian_spec(Vector mean, SymMatrix scale);
  static DistributionSpec student_t_spec(Vector mean, SymMatrix scale, double df);
  static DistributionSpec pareto_spec(Index dim, Vector mean, double tail_index);
  static DistributionSpec lognormal_spec(Index dim, Vector mean, double log_sigma);
  static DistributionSpec point_mass_spec(Vector mean);

  /// Per-coordinate population covariance of the generated data (diagonal
  /// for pareto/lognormal); equals `scale` for gaussian/student_t.
  SymMatrix covariance() const;
};

Dataset sample_clean(const DistributionSpec& spec, Index n, RngStream rng);

enum class ContamModel { huber, adversarial };
enum class AdversarialStrategy { far_point_mass, mean_shift, block_concentrated };

struct ContaminationSpec {
  ContamModel model = ContamModel::adversarial;
  double eps_corrupt = 0.0;  // in [0, 1)
  AdversarialStrategy strategy = AdversarialStrategy::far_point_mass;
  double magnitude = 0.0;
  std::optional<DistributionSpec> q_distribution;  // huber outlier law
};

struct ContaminatedSample {
  Dataset data;
  std::vector<Index> outlier_indices;  // sorted
  std::optional<Dataset> clean_reference;
};

/// Huber mixture: each row independently replaced by a Q draw w.p. eps.
ContaminatedSample huber_contaminate(const Dataset& clean, double eps,
                                     const DistributionSpec& q_spec, RngStream rng);

/// Strong contamination: exactly floor(eps*N) rows replaced.
///  - far_point_mass: outliers collapse onto anchor + magnitude*(1..1)/sqrt(d),
///    anchor = target_estimator_hint if given else the clean empirical mean;
///  - mean_shift: outlier = clean row + magnitude*(1..1)/sqrt(d);
///  - block_concentrated: outlier indices packed to fully corrupt as many
///    blocks of partition_hint as possible (falls back to random placement
///    when no hint is given), values as in far_point_mass.
ContaminatedSample adversarial_corrupt(const Dataset& clean, double eps,
                                       AdversarialStrategy strategy, double magnitude,
                                       const Vector* target_estimator_hint,
                                       const BlockPartition* partition_hint,
                                       RngStream rng);

}  // namespace robustmom
