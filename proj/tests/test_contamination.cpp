#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "robustmom/contamination.hpp"

using namespace robustmom;
using test_helpers::op_norm;

TEST_SUITE_BEGIN("contamination");

TEST_CASE("sample_clean: point mass and parameter validation") {
  Vector mu(2);
  mu << 1.0, -2.0;
  const Dataset d = sample_clean(DistributionSpec::point_mass_spec(mu), 50, RngStream(1));
  for (Index i = 0; i < 50; ++i) {
    CHECK(d.values(i, 0) == 1.0);
    CHECK(d.values(i, 1) == -2.0);
  }
  CHECK_THROWS_AS(DistributionSpec::student_t_spec(mu, SymMatrix::identity(2), 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::pareto_spec(2, mu, 1.5), std::invalid_argument);
}

TEST_CASE("sample_clean: gaussian second moment matches the scale") {
  const Dataset d = sample_clean(
      DistributionSpec::gaussian_spec(Vector::Zero(2), SymMatrix::identity(2)), 100000,
      RngStream(2));
  const Matrix cov = d.values.transpose() * d.values / 100000.0;
  CHECK(op_norm(cov - Matrix::Identity(2, 2)) < 0.05);
}

TEST_CASE("sample_clean: student_t normalization across df") {
  for (double df : {3.0, 5.0, 10.0}) {
    const Dataset d = sample_clean(
        DistributionSpec::student_t_spec(Vector::Zero(1), SymMatrix::identity(1), df), 100000,
        RngStream(3, static_cast<std::uint64_t>(df)));
    const double var = d.values.col(0).squaredNorm() / 100000.0;
    const double window = (df == 3.0) ? 0.25 : 0.10;
    CHECK(var == doctest::Approx(1.0).epsilon(window));
  }
}

TEST_CASE("sample_clean: pareto and lognormal hit the requested mean") {
  Vector mu(3);
  mu << -1.0, 0.0, 2.0;
  const Dataset p = sample_clean(DistributionSpec::pareto_spec(3, mu, 3.0), 100000, RngStream(4));
  const Vector p_mean = p.values.colwise().mean().transpose();
  for (Index j = 0; j < 3; ++j) CHECK(std::abs(p_mean[j] - mu[j]) < 0.03);

  const Dataset l =
      sample_clean(DistributionSpec::lognormal_spec(3, mu, 1.0), 100000, RngStream(5));
  const Vector l_mean = l.values.colwise().mean().transpose();
  for (Index j = 0; j < 3; ++j) CHECK(std::abs(l_mean[j] - mu[j]) < 0.08);
}

TEST_CASE("huber_contaminate: identity at eps = 0 and binomial counts") {
  RngStream rng(6);
  const Dataset clean = Dataset::make(test_helpers::random_gaussian(200, 2, rng));
  const DistributionSpec q = DistributionSpec::point_mass_spec(Vector::Constant(2, 50.0));

  const ContaminatedSample same = huber_contaminate(clean, 0.0, q, RngStream(7));
  CHECK(same.outlier_indices.empty());
  CHECK((same.data.values - clean.values).cwiseAbs().maxCoeff() == 0.0);

  const Dataset big = Dataset::make(test_helpers::random_gaussian(10000, 1, rng));
  const DistributionSpec q1 = DistributionSpec::point_mass_spec(Vector::Constant(1, 50.0));
  int in_window = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const ContaminatedSample out =
        huber_contaminate(big, 0.1, q1, RngStream(8, static_cast<std::uint64_t>(rep)));
    const auto count = static_cast<Index>(out.outlier_indices.size());
    if (count >= 850 && count <= 1150) ++in_window;
  }
  CHECK(in_window == 20);  // 4-sigma window, 20 draws

  // nearly-everything replaced at eps close to 1
  const ContaminatedSample most = huber_contaminate(big, 0.999, q1, RngStream(9));
  CHECK(static_cast<double>(most.outlier_indices.size()) > 0.98 * 10000);
}

TEST_CASE("adversarial_corrupt: exact counts and off-O identity") {
  RngStream rng(10);
  const Dataset clean = Dataset::make(test_helpers::random_gaussian(100, 2, rng));

  const ContaminatedSample none = adversarial_corrupt(
      clean, 0.0, AdversarialStrategy::far_point_mass, 100.0, nullptr, nullptr, RngStream(11));
  CHECK(none.outlier_indices.empty());
  CHECK((none.data.values - clean.values).cwiseAbs().maxCoeff() == 0.0);

  const ContaminatedSample out = adversarial_corrupt(
      clean, 0.05, AdversarialStrategy::far_point_mass, 100.0, nullptr, nullptr, RngStream(12));
  REQUIRE(out.outlier_indices.size() == 5);
  const Vector bulk = clean.values.colwise().mean().transpose();
  std::set<Index> outliers(out.outlier_indices.begin(), out.outlier_indices.end());
  for (Index i = 0; i < 100; ++i) {
    if (outliers.count(i)) {
      const double dist = (out.data.values.row(i).transpose() - bulk).norm();
      CHECK(dist == doctest::Approx(100.0).epsilon(1e-9));
    } else {
      // bit-identical off the corrupted set
      CHECK((out.data.values.row(i) - clean.values.row(i)).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  // floor(eps N) is exact even when eps*N sits on an integer boundary
  const Dataset wide = Dataset::make(test_helpers::random_gaussian(100, 1, rng));
  const ContaminatedSample c29 = adversarial_corrupt(
      wide, 0.29, AdversarialStrategy::mean_shift, 1.0, nullptr, nullptr, RngStream(13));
  CHECK(c29.outlier_indices.size() == 29);
}

TEST_CASE("adversarial_corrupt: mean_shift moves rows by the fixed direction") {
  RngStream rng(14);
  const Dataset clean = Dataset::make(test_helpers::random_gaussian(50, 2, rng));
  const ContaminatedSample out = adversarial_corrupt(
      clean, 0.2, AdversarialStrategy::mean_shift, 10.0, nullptr, nullptr, RngStream(15));
  REQUIRE(out.outlier_indices.size() == 10);
  const double unit = 10.0 / std::sqrt(2.0);
  for (Index idx : out.outlier_indices) {
    CHECK(out.data.values(idx, 0) - clean.values(idx, 0) == doctest::Approx(unit).epsilon(1e-12));
    CHECK(out.data.values(idx, 1) - clean.values(idx, 1) == doctest::Approx(unit).epsilon(1e-12));
  }
}

TEST_CASE("adversarial_corrupt: block_concentrated fully corrupts whole blocks") {
  RngStream rng(16);
  const Dataset clean = Dataset::make(test_helpers::random_gaussian(100, 2, rng));
  const BlockPartition hint = partition(100, 10, RngStream(17));
  const ContaminatedSample out =
      adversarial_corrupt(clean, 0.25, AdversarialStrategy::block_concentrated, 50.0, nullptr,
                          &hint, RngStream(18));
  REQUIRE(out.outlier_indices.size() == 25);
  std::set<Index> outliers(out.outlier_indices.begin(), out.outlier_indices.end());
  Index fully_corrupted = 0;
  for (const auto& block : hint.assignments) {
    bool all = true;
    for (Index idx : block)
      if (!outliers.count(idx)) all = false;
    if (all) ++fully_corrupted;
  }
  CHECK(fully_corrupted == 2);  // floor(25 / 10)
}

TEST_SUITE_END();
