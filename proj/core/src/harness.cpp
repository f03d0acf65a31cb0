#include "robustmom/harness.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <thread>

#include "robustmom/blocking.hpp"
#include "robustmom/covariance.hpp"
#include "robustmom/depth.hpp"
#include "robustmom/mean.hpp"
#include "robustmom/version.hpp"

namespace robustmom {

using nlohmann::json;

namespace {

// sub-stream tags within one trial stream
constexpr std::uint64_t kSampleTag = 0x5a;
constexpr std::uint64_t kContamTag = 0xc0;
constexpr std::uint64_t kEstimatorTag = 0xe5;
constexpr std::uint64_t kPoolTag = 0x70;
constexpr std::uint64_t kOracleTag = 0x0a;

const std::vector<std::string> kMeanEstimators = {
    "lm_mom", "coordwise_mom", "geomedian_mom", "tukey_mom", "empirical_mean"};

double op_norm(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::string kind_name(DistKind k) {
  switch (k) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::student_t: return "student_t";
    case DistKind::pareto: return "pareto";
    case DistKind::lognormal: return "lognormal";
    case DistKind::point_mass: return "point_mass";
  }
  return "unknown";
}

DistKind kind_from_name(const std::string& s) {
  if (s == "gaussian") return DistKind::gaussian;
  if (s == "student_t") return DistKind::student_t;
  if (s == "pareto") return DistKind::pareto;
  if (s == "lognormal") return DistKind::lognormal;
  if (s == "point_mass") return DistKind::point_mass;
  throw ConfigError("distribution.kind: unknown value '" + s + "'");
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& j, Index expect_dim, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": entries must be numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  if (expect_dim >= 0 && v.size() != expect_dim)
    throw ConfigError(what + ": expected " + std::to_string(expect_dim) + " entries");
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Index expect_dim, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected an array of rows");
  const auto rows = static_cast<Index>(j.size());
  Matrix m(rows, rows);
  for (Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], rows, what + " row");
    m.row(r) = row.transpose();
  }
  if (expect_dim >= 0 && rows != expect_dim)
    throw ConfigError(what + ": expected a " + std::to_string(expect_dim) + "x" +
                      std::to_string(expect_dim) + " matrix");
  return m;
}

DistributionSpec distribution_from_json(const json& j, Index dim) {
  if (!j.is_object()) throw ConfigError("distribution: expected an object");
  DistributionSpec spec;
  spec.kind = kind_from_name(j.value("kind", std::string{"gaussian"}));
  spec.dim = j.value("dim", dim);
  if (spec.dim != dim)
    throw ConfigError("distribution.dim must match the top-level dim");
  spec.mean = j.contains("mean") ? vector_from_json(j.at("mean"), dim, "distribution.mean")
                                 : Vector::Zero(dim);
  spec.scale = j.contains("scale")
                   ? SymMatrix::make(matrix_from_json(j.at("scale"), dim, "distribution.scale"))
                   : SymMatrix::identity(dim);
  spec.df = j.value("df", 3.0);
  spec.tail_index = j.value("tail_index", 3.0);
  spec.log_sigma = j.value("log_sigma", 1.0);
  if (spec.kind == DistKind::student_t && !(spec.df > 2.0))
    throw ConfigError("distribution.df: student_t needs df > 2");
  if (spec.kind == DistKind::pareto && !(spec.tail_index > 2.0))
    throw ConfigError("distribution.tail_index: pareto needs tail_index > 2");
  return spec;
}

json distribution_to_json(const DistributionSpec& spec) {
  json j;
  j["kind"] = kind_name(spec.kind);
  j["dim"] = spec.dim;
  j["mean"] = vector_to_json(spec.mean);
  switch (spec.kind) {
    case DistKind::gaussian:
      j["scale"] = matrix_to_json(spec.scale.m);
      break;
    case DistKind::student_t:
      j["scale"] = matrix_to_json(spec.scale.m);
      j["df"] = spec.df;
      break;
    case DistKind::pareto:
      j["tail_index"] = spec.tail_index;
      break;
    case DistKind::lognormal:
      j["log_sigma"] = spec.log_sigma;
      break;
    case DistKind::point_mass:
      break;
  }
  return j;
}

ContaminationSpec contamination_from_json(const json& j, Index dim) {
  ContaminationSpec spec;
  if (j.is_null()) return spec;  // no contamination
  if (!j.is_object()) throw ConfigError("contamination: expected an object");
  const std::string model = j.value("model", std::string{"adversarial"});
  if (model == "huber")
    spec.model = ContamModel::huber;
  else if (model == "adversarial")
    spec.model = ContamModel::adversarial;
  else
    throw ConfigError("contamination.model: unknown value '" + model + "'");
  spec.eps_corrupt = j.value("eps_corrupt", 0.0);
  if (!(spec.eps_corrupt >= 0.0 && spec.eps_corrupt < 1.0))
    throw ConfigError("contamination.eps_corrupt: must be in [0, 1)");
  const std::string strategy = j.value("strategy", std::string{"far_point_mass"});
  if (strategy == "far_point_mass")
    spec.strategy = AdversarialStrategy::far_point_mass;
  else if (strategy == "mean_shift")
    spec.strategy = AdversarialStrategy::mean_shift;
  else if (strategy == "block_concentrated")
    spec.strategy = AdversarialStrategy::block_concentrated;
  else
    throw ConfigError("contamination.strategy: unknown value '" + strategy + "'");
  spec.magnitude = j.value("magnitude", 0.0);
  if (j.contains("q_distribution"))
    spec.q_distribution = distribution_from_json(j.at("q_distribution"), dim);
  return spec;
}

json contamination_to_json(const ContaminationSpec& spec) {
  json j;
  j["model"] = spec.model == ContamModel::huber ? "huber" : "adversarial";
  j["eps_corrupt"] = spec.eps_corrupt;
  switch (spec.strategy) {
    case AdversarialStrategy::far_point_mass: j["strategy"] = "far_point_mass"; break;
    case AdversarialStrategy::mean_shift: j["strategy"] = "mean_shift"; break;
    case AdversarialStrategy::block_concentrated: j["strategy"] = "block_concentrated"; break;
  }
  j["magnitude"] = spec.magnitude;
  if (spec.q_distribution) j["q_distribution"] = distribution_to_json(*spec.q_distribution);
  return j;
}

Index desired_threads() {
  Index n = 0;
  if (const char* env = std::getenv("ROBUST_MOM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 0) n = static_cast<Index>(v);
  }
  if (n == 0) n = static_cast<Index>(std::thread::hardware_concurrency());
  return std::max<Index>(1, n);
}

struct Truth {
  Vector mean;
  SymMatrix covariance;
  SymMatrix pca_projector;  // top-k of the true covariance
  double r_weak = 0.0;
  double sigma = 0.0;
};

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mean: return "mean";
    case ExperimentKind::covariance: return "covariance";
    case ExperimentKind::tukey: return "tukey";
    case ExperimentKind::pca: return "pca";
    case ExperimentKind::lemma7: return "lemma7";
  }
  return "unknown";
}

Index ExperimentConfig::resolve_n_blocks() const {
  if (!n_blocks.is_auto()) {
    if (n_blocks.fixed > n_samples)
      throw ConfigError("n_blocks: K must not exceed n_samples");
    return n_blocks.fixed;
  }
  const auto corrupt = static_cast<Index>(
      std::floor(contamination.eps_corrupt * static_cast<double>(n_samples) + 1e-9));
  try {
    return choose_block_count(n_blocks.auto_delta, dim, corrupt, n_samples);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  const std::string kind = j.value("experiment", std::string{});
  if (kind == "mean")
    cfg.experiment = ExperimentKind::mean;
  else if (kind == "covariance")
    cfg.experiment = ExperimentKind::covariance;
  else if (kind == "tukey")
    cfg.experiment = ExperimentKind::tukey;
  else if (kind == "pca")
    cfg.experiment = ExperimentKind::pca;
  else if (kind == "lemma7")
    cfg.experiment = ExperimentKind::lemma7;
  else
    throw ConfigError("experiment: must be one of mean|covariance|tukey|pca|lemma7");

  if (!j.contains("dim") || !j.at("dim").is_number_integer())
    throw ConfigError("dim: required positive integer");
  cfg.dim = j.at("dim").get<Index>();
  if (cfg.dim < 1) throw ConfigError("dim: must be >= 1");

  if (!j.contains("n_samples") || !j.at("n_samples").is_number_integer())
    throw ConfigError("n_samples: required positive integer");
  cfg.n_samples = j.at("n_samples").get<Index>();
  if (cfg.n_samples < 1) throw ConfigError("n_samples: must be >= 1");

  if (!j.contains("n_trials") || !j.at("n_trials").is_number_integer())
    throw ConfigError("n_trials: required positive integer");
  cfg.n_trials = j.at("n_trials").get<Index>();
  if (cfg.n_trials < 1) throw ConfigError("n_trials: must be >= 1");

  cfg.seed = j.value("seed", std::uint64_t{0});

  cfg.distribution = distribution_from_json(j.value("distribution", json::object()), cfg.dim);
  cfg.contamination = contamination_from_json(j.value("contamination", json()), cfg.dim);

  if (!j.contains("n_blocks")) throw ConfigError("n_blocks: required (integer or \"auto(delta)\")");
  const json& nb = j.at("n_blocks");
  if (nb.is_number_integer()) {
    const Index k = nb.get<Index>();
    if (k < 1) throw ConfigError("n_blocks: must be >= 1");
    cfg.n_blocks = BlockCountSpec::fixed_k(k);
  } else if (nb.is_string()) {
    const std::string s = nb.get<std::string>();
    if (s.rfind("auto(", 0) != 0 || s.back() != ')')
      throw ConfigError("n_blocks: string form must be \"auto(delta)\"");
    double delta = 0.0;
    try {
      delta = std::stod(s.substr(5, s.size() - 6));
    } catch (...) {
      throw ConfigError("n_blocks: could not parse delta in \"auto(delta)\"");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("n_blocks: delta must be in (0,1)");
    cfg.n_blocks = BlockCountSpec::auto_k(delta);
  } else {
    throw ConfigError("n_blocks: must be an integer or \"auto(delta)\"");
  }

  if (j.contains("pool")) {
    const json& p = j.at("pool");
    if (!p.is_object()) throw ConfigError("pool: expected an object");
    cfg.pool.n_random = p.value("n_random", Index{256});
    if (cfg.pool.n_random < 0) throw ConfigError("pool.n_random: must be >= 0");
    cfg.pool.use_data_hint = p.value("use_data_hint", false);
  }

  if (j.contains("estimators")) {
    const json& e = j.at("estimators");
    if (!e.is_array()) throw ConfigError("estimators: expected an array of names");
    for (const auto& name : e) cfg.estimators.push_back(name.get<std::string>());
  }
  cfg.pca_rank = j.value("pca_rank", Index{1});
  cfg.lemma_alpha = j.value("lemma_alpha", 2.0);
  if (!(cfg.lemma_alpha > 1.0)) throw ConfigError("lemma_alpha: must be > 1");
  cfg.measure_wall_time = j.value("measure_wall_time", false);

  // per-experiment estimator validation
  switch (cfg.experiment) {
    case ExperimentKind::mean: {
      if (cfg.estimators.empty()) cfg.estimators = kMeanEstimators;
      for (const auto& name : cfg.estimators)
        if (std::find(kMeanEstimators.begin(), kMeanEstimators.end(), name) ==
            kMeanEstimators.end())
          throw ConfigError("estimators: unknown mean estimator '" + name + "'");
      break;
    }
    case ExperimentKind::tukey:
      if (cfg.estimators.empty()) cfg.estimators = {"tukey_mom"};
      if (cfg.estimators != std::vector<std::string>{"tukey_mom"})
        throw ConfigError("estimators: tukey experiment runs only 'tukey_mom'");
      break;
    case ExperimentKind::covariance:
      if (cfg.estimators.empty()) cfg.estimators = {"cov_mom"};
      if (cfg.estimators != std::vector<std::string>{"cov_mom"})
        throw ConfigError("estimators: covariance experiment runs only 'cov_mom'");
      break;
    case ExperimentKind::pca:
      if (cfg.estimators.empty()) cfg.estimators = {"robust_pca"};
      if (cfg.estimators != std::vector<std::string>{"robust_pca"})
        throw ConfigError("estimators: pca experiment runs only 'robust_pca'");
      if (cfg.pca_rank < 1 || cfg.pca_rank >= cfg.dim)
        throw ConfigError("pca_rank: need 1 <= pca_rank < dim");
      break;
    case ExperimentKind::lemma7:
      if (cfg.estimators.empty()) cfg.estimators = {"lemma7"};
      if (cfg.estimators != std::vector<std::string>{"lemma7"})
        throw ConfigError("estimators: lemma7 experiment runs only 'lemma7'");
      break;
  }
  if ((cfg.experiment == ExperimentKind::covariance || cfg.experiment == ExperimentKind::pca)) {
    if (cfg.distribution.kind == DistKind::student_t && !(cfg.distribution.df > 4.0))
      throw ConfigError("distribution.df: sigma oracle needs df > 4 for covariance/pca");
    if (cfg.distribution.kind == DistKind::pareto && !(cfg.distribution.tail_index > 4.0))
      throw ConfigError("distribution.tail_index: sigma oracle needs tail_index > 4");
  }
  cfg.resolve_n_blocks();  // validate now for early errors
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = to_string(experiment);
  j["distribution"] = distribution_to_json(distribution);
  j["contamination"] = contamination_to_json(contamination);
  j["n_samples"] = n_samples;
  j["dim"] = dim;
  if (n_blocks.is_auto())
    j["n_blocks"] = "auto(" + format_double(n_blocks.auto_delta) + ")";
  else
    j["n_blocks"] = n_blocks.fixed;
  j["pool"] = {{"n_random", pool.n_random}, {"use_data_hint", pool.use_data_hint}};
  j["n_trials"] = n_trials;
  j["seed"] = seed;
  j["estimators"] = estimators;
  if (experiment == ExperimentKind::pca) j["pca_rank"] = pca_rank;
  if (experiment == ExperimentKind::lemma7) j["lemma_alpha"] = lemma_alpha;
  j["measure_wall_time"] = measure_wall_time;
  return j;
}

namespace {

Truth compute_truth(const ExperimentConfig& cfg, const DirectionPool& oracle_pool) {
  Truth t;
  t.mean = cfg.distribution.mean;
  t.covariance = cfg.distribution.covariance();
  const RngStream oracle_rng = RngStream(cfg.seed).derive(kOracleTag);

  // R analytic for the gaussian family, Monte Carlo oracle otherwise
  if (cfg.distribution.kind == DistKind::gaussian ||
      cfg.distribution.kind == DistKind::point_mass) {
    t.r_weak = std::sqrt(op_norm(t.covariance.m));
  } else {
    t.r_weak = r_weak_oracle(cfg.distribution, t.mean, oracle_pool, 20000, oracle_rng);
  }

  if (cfg.experiment == ExperimentKind::covariance || cfg.experiment == ExperimentKind::pca) {
    if (cfg.distribution.kind == DistKind::gaussian) {
      t.sigma = std::sqrt(2.0) * op_norm(t.covariance.m);
    } else if (cfg.distribution.kind == DistKind::point_mass) {
      t.sigma = 0.0;
    } else {
      t.sigma = sigma_weak_oracle(cfg.distribution, t.covariance, oracle_pool, 20000,
                                  oracle_rng.derive(1));
    }
  }
  if (cfg.experiment == ExperimentKind::pca) {
    const EigenDecomposition eig = sym_eigendecomposition(t.covariance);
    Matrix proj = Matrix::Zero(cfg.dim, cfg.dim);
    for (Index j = 0; j < cfg.pca_rank; ++j)
      proj.noalias() += eig.eigvecs.col(j) * eig.eigvecs.col(j).transpose();
    t.pca_projector = SymMatrix{0.5 * (proj + proj.transpose())};
  }
  return t;
}

ContaminatedSample apply_contamination(const ExperimentConfig& cfg, const Dataset& clean,
                                       Index k_blocks, RngStream trial_stream) {
  const ContaminationSpec& spec = cfg.contamination;
  RngStream crng = trial_stream.derive(kContamTag);
  if (spec.eps_corrupt <= 0.0) {
    ContaminatedSample out;
    out.data = Dataset::make(clean.values);
    out.clean_reference = Dataset::make(clean.values);
    return out;
  }
  if (spec.model == ContamModel::huber) {
    DistributionSpec q = spec.q_distribution.value_or(DistributionSpec::point_mass_spec(
        cfg.distribution.mean +
        spec.magnitude * Vector::Ones(cfg.dim) / std::sqrt(static_cast<double>(cfg.dim))));
    return huber_contaminate(clean, spec.eps_corrupt, q, crng);
  }
  if (spec.strategy == AdversarialStrategy::block_concentrated) {
    // the adversary knows the estimator streams, so it can replay the exact
    // partition the estimators will draw
    RngStream est_rng = trial_stream.derive(kEstimatorTag);
    const BlockPartition hint = partition(clean.n_samples(), k_blocks, est_rng);
    return adversarial_corrupt(clean, spec.eps_corrupt, spec.strategy, spec.magnitude,
                               nullptr, &hint, crng);
  }
  return adversarial_corrupt(clean, spec.eps_corrupt, spec.strategy, spec.magnitude,
                             nullptr, nullptr, crng);
}

double theoretical_cap(const ExperimentConfig& cfg, Index k_blocks) {
  switch (cfg.experiment) {
    case ExperimentKind::tukey:
      return std::exp(-static_cast<double>(k_blocks) /
                      (32.0 * static_cast<double>(cfg.dim * cfg.dim)));
    case ExperimentKind::lemma7:
      return std::exp(-static_cast<double>(k_blocks) / (8.0 * cfg.lemma_alpha * cfg.lemma_alpha));
    default:
      return std::exp(-static_cast<double>(k_blocks) / 128.0);
  }
}

std::vector<TrialRecord> run_one_trial(const ExperimentConfig& cfg, Index trial,
                                       Index k_blocks, const Truth& truth,
                                       const DirectionPool& shared_pool) {
  RngStream trial_stream(cfg.seed, static_cast<std::uint64_t>(trial));
  const Dataset clean = sample_clean(cfg.distribution, cfg.n_samples,
                                     trial_stream.derive(kSampleTag));
  const ContaminatedSample sample = apply_contamination(cfg, clean, k_blocks, trial_stream);
  const Dataset& data = sample.data;
  RngStream est_rng = trial_stream.derive(kEstimatorTag);

  DirectionPool trial_pool = shared_pool;
  if (cfg.pool.use_data_hint)
    trial_pool = make_direction_pool(cfg.dim, cfg.pool.n_random, &data,
                                     trial_stream.derive(kPoolTag));

  std::vector<TrialRecord> records;
  records.reserve(cfg.estimators.size());
  for (const std::string& name : cfg.estimators) {
    TrialRecord rec;
    rec.trial_id = trial;
    rec.estimator = name;
    const auto t0 = std::chrono::steady_clock::now();
    switch (cfg.experiment) {
      case ExperimentKind::mean:
      case ExperimentKind::tukey: {
        Vector point;
        if (name == "lm_mom") {
          const MeanEstimate est = lm_mom_estimate(data, k_blocks, trial_pool, {}, est_rng);
          point = est.point;
          rec.certificate = est.achieved_eps;
        } else if (name == "coordwise_mom") {
          point = coordinatewise_mom(data, k_blocks, est_rng);
        } else if (name == "geomedian_mom") {
          point = geomedian_mom(data, k_blocks, est_rng);
        } else if (name == "tukey_mom") {
          const TukeyMomEstimate est = tukey_mom(data, k_blocks, est_rng);
          point = est.point;
          rec.certificate = static_cast<double>(est.depth);
        } else {  // empirical_mean
          point = empirical_mean(data);
        }
        rec.error = (point - truth.mean).norm();
        rec.bound = (cfg.experiment == ExperimentKind::tukey)
                        ? tukey_error_bound(truth.r_weak, k_blocks, cfg.n_samples, cfg.dim)
                        : mean_error_bound(
                              BoundInputs{truth.r_weak, k_blocks, cfg.n_samples, cfg.dim});
        break;
      }
      case ExperimentKind::covariance: {
        CovMomOptions opts;
        opts.center = CovCenter::mom_mean;
        const CovEstimate est = cov_mom_estimate(data, k_blocks, trial_pool, opts, est_rng);
        rec.error = op_norm(est.matrix.m - truth.covariance.m);
        rec.bound = cov_error_bound(truth.sigma, k_blocks, cfg.n_samples);
        rec.certificate = est.achieved_eps;
        break;
      }
      case ExperimentKind::pca: {
        const PcaResult est =
            robust_pca(data, k_blocks, cfg.pca_rank, trial_pool, truth.sigma, est_rng);
        rec.error = op_norm(est.projector.m - truth.pca_projector.m);
        rec.bound = est.bound.value();
        rec.certificate = est.gap;
        break;
      }
      case ExperimentKind::lemma7: {
        const BlockPartition part = partition(data.n_samples(), k_blocks, est_rng);
        const BlockMeans means = block_means(data, part);
        const Index m = part.block_size;
        // r tuned so Markov gives P(|<Xbar - mu, v>| > r) <= 1/(4 alpha)
        const double r = truth.r_weak *
                         std::sqrt(4.0 * cfg.lemma_alpha / static_cast<double>(m));
        // worst outlier-block fraction over the pool; a direction violates the
        // block-majority event exactly when its fraction exceeds 1/alpha
        double worst_frac = 0.0;
        for (const Vector& v : trial_pool.directions) {
          Index bad = 0;
          for (const Vector& bm : means.means)
            if (std::abs((bm - truth.mean).dot(v)) > r) ++bad;
          worst_frac = std::max(worst_frac,
                                static_cast<double>(bad) / static_cast<double>(k_blocks));
        }
        rec.error = worst_frac;
        rec.bound = 1.0 / cfg.lemma_alpha;
        rec.certificate = r;
        break;
      }
    }
    rec.within_bound = rec.error <= rec.bound;
    if (cfg.measure_wall_time) {
      const auto t1 = std::chrono::steady_clock::now();
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

CampaignResult run_campaign(const ExperimentConfig& cfg) {
  const Index k_blocks = cfg.resolve_n_blocks();
  // data-independent pool shared across trials (also used by the oracles)
  const DirectionPool shared_pool = make_direction_pool(
      cfg.dim, cfg.pool.n_random, nullptr, RngStream(cfg.seed).derive(kPoolTag));
  const Truth truth = compute_truth(cfg, shared_pool);

  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.n_trials));
  const Index n_threads = std::min<Index>(desired_threads(), cfg.n_trials);
  if (n_threads <= 1) {
    for (Index t = 0; t < cfg.n_trials; ++t)
      per_trial[static_cast<std::size_t>(t)] =
          run_one_trial(cfg, t, k_blocks, truth, shared_pool);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (Index w = 0; w < n_threads; ++w)
      workers.emplace_back([&] {
        for (;;) {
          const Index t = next.fetch_add(1);
          if (t >= cfg.n_trials) return;
          per_trial[static_cast<std::size_t>(t)] =
              run_one_trial(cfg, t, k_blocks, truth, shared_pool);
        }
      });
    for (auto& w : workers) w.join();
  }

  CampaignResult result;
  for (auto& trial_records : per_trial)
    for (auto& rec : trial_records) result.records.push_back(std::move(rec));

  result.summary.library_version = kVersion;
  result.summary.seed = cfg.seed;
  result.summary.config_echo = cfg.to_json().dump();
  for (const std::string& name : cfg.estimators) {
    std::vector<double> errors;
    std::vector<double> bounds;
    double failures = 0.0;
    for (const TrialRecord& rec : result.records) {
      if (rec.estimator != name) continue;
      errors.push_back(rec.error);
      bounds.push_back(rec.bound);
      if (!rec.within_bound) failures += 1.0;
    }
    EstimatorSummary s;
    s.q50 = empirical_quantile(errors, 0.50);
    s.q90 = empirical_quantile(errors, 0.90);
    s.q95 = empirical_quantile(errors, 0.95);
    s.q99 = empirical_quantile(errors, 0.99);
    s.failure_fraction = failures / static_cast<double>(errors.size());
    s.theoretical_failure_cap = theoretical_cap(cfg, k_blocks);
    s.bound_value = empirical_quantile(bounds, 0.50);
    result.summary.per_estimator[name] = s;
  }
  return result;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out = "trial_id,estimator,error,bound,within_bound,certificate,wall_time_ms\n";
  for (const TrialRecord& r : records) {
    out += std::to_string(r.trial_id);
    out += ',';
    out += r.estimator;
    out += ',';
    out += format_double(r.error);
    out += ',';
    out += format_double(r.bound);
    out += ',';
    out += r.within_bound ? "true" : "false";
    out += ',';
    out += format_double(r.certificate);
    out += ',';
    out += format_double(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path.string());
  out << to_csv(records);
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path.string());
}

std::string to_json_text(const CampaignSummary& summary) {
  json j;
  j["library_version"] = summary.library_version;
  j["seed"] = summary.seed;
  j["config"] = json::parse(summary.config_echo);
  json est = json::object();
  for (const auto& [name, s] : summary.per_estimator) {
    est[name] = {{"q50", s.q50},
                 {"q90", s.q90},
                 {"q95", s.q95},
                 {"q99", s.q99},
                 {"failure_fraction", s.failure_fraction},
                 {"theoretical_failure_cap", s.theoretical_failure_cap},
                 {"bound_value", s.bound_value}};
  }
  j["estimators"] = est;
  return j.dump(2) + "\n";
}

void emit_json(const CampaignSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_json: cannot open " + path.string());
  out << to_json_text(summary);
  if (!out) throw std::runtime_error("emit_json: write failed for " + path.string());
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty input");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  const auto rank = static_cast<std::size_t>(
      std::max(1.0, std::ceil(p * static_cast<double>(n))));
  return values[std::min(rank, n) - 1];
}

}  // namespace robustmom
