#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "robustmom/contamination.hpp"
#include "robustmom/types.hpp"

namespace robustmom {

enum class ExperimentKind { mean, covariance, tukey, pca, lemma7 };

std::string to_string(ExperimentKind k);

/// Thrown on malformed or inconsistent configuration; the CLI maps it to
/// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoolConfig {
  Index n_random = 256;
  bool use_data_hint = false;
};

struct BlockCountSpec {
  // fixed K when >= 1, otherwise auto-selected from auto_delta
  Index fixed = -1;
  double auto_delta = 0.0;

  static BlockCountSpec fixed_k(Index k) { return BlockCountSpec{k, 0.0}; }
  static BlockCountSpec auto_k(double delta) { return BlockCountSpec{-1, delta}; }
  bool is_auto() const { return fixed < 1; }
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::mean;
  DistributionSpec distribution;
  ContaminationSpec contamination;
  Index n_samples = 0;
  Index dim = 0;
  BlockCountSpec n_blocks;
  PoolConfig pool;
  Index n_trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators;
  Index pca_rank = 1;
  double lemma_alpha = 2.0;
  // when false (the default) wall_time_ms is reported as 0 so trials.csv is
  // byte-stable across reruns of the same (config, seed)
  bool measure_wall_time = false;

  /// Resolves the block count against n_samples (and the corruption budget
  /// floor(eps*N) in auto mode).
  Index resolve_n_blocks() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct TrialRecord {
  Index trial_id = 0;
  std::string estimator;
  double error = 0.0;        // l2 for mean-type, operator norm for matrices
  double bound = 0.0;
  bool within_bound = false;  // always exactly (error <= bound)
  double certificate = 0.0;   // achieved_eps or depth; 0 when not applicable
  double wall_time_ms = 0.0;
};

struct EstimatorSummary {
  double q50 = 0.0;
  double q90 = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
  double failure_fraction = 0.0;
  double theoretical_failure_cap = 0.0;
  double bound_value = 0.0;
};

struct CampaignSummary {
  std::string library_version;
  std::uint64_t seed = 0;
  std::map<std::string, EstimatorSummary> per_estimator;
  // config echo kept as serialized JSON text to avoid dragging the json type
  // into this header
  std::string config_echo;
};

struct CampaignResult {
  CampaignSummary summary;
  std::vector<TrialRecord> records;
};

/// Runs n_trials seeded Monte Carlo trials (stream_id = trial index). Trials
/// run in parallel when ROBUST_MOM_THREADS allows; records are ordered by
/// trial_id regardless of scheduling.
CampaignResult run_campaign(const ExperimentConfig& config);

/// Columns: trial_id,estimator,error,bound,within_bound,certificate,wall_time_ms
/// Floats use shortest round-trip formatting; LF line endings.
std::string to_csv(const std::vector<TrialRecord>& records);
void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);

std::string to_json_text(const CampaignSummary& summary);
void emit_json(const CampaignSummary& summary, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

/// Empirical lower quantile: sorted[ceil(p*n)-1].
double empirical_quantile(std::vector<double> values, double p);

}  // namespace robustmom
