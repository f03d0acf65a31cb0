#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "helpers.hpp"
#include "robustmom/depth.hpp"
#include "robustmom/harness.hpp"
#include "robustmom/version.hpp"

using namespace robustmom;
using nlohmann::json;

namespace {

json minimal_mean_config() {
  return json{{"experiment", "mean"},
              {"dim", 2},
              {"n_samples", 200},
              {"n_blocks", 8},
              {"n_trials", 10},
              {"seed", 42},
              {"pool", {{"n_random", 16}}},
              {"estimators", {"lm_mom", "empirical_mean"}},
              {"distribution", {{"kind", "gaussian"}}}};
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config: parses and validates") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(minimal_mean_config());
  CHECK(cfg.experiment == ExperimentKind::mean);
  CHECK(cfg.n_samples == 200);
  CHECK(cfg.resolve_n_blocks() == 8);

  json missing = minimal_mean_config();
  missing.erase("n_samples");
  CHECK_THROWS_AS(ExperimentConfig::from_json(missing), ConfigError);

  json bad_est = minimal_mean_config();
  bad_est["estimators"] = {"nonsense"};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_est), ConfigError);

  json too_many_blocks = minimal_mean_config();
  too_many_blocks["n_blocks"] = 500;
  CHECK_THROWS_AS(ExperimentConfig::from_json(too_many_blocks), ConfigError);

  json bad_auto = minimal_mean_config();
  bad_auto["n_blocks"] = "auto(2)";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_auto), ConfigError);

  json bad_kind = minimal_mean_config();
  bad_kind["distribution"]["kind"] = "cauchy";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_kind), ConfigError);
}

TEST_CASE("config: auto block count folds in the corruption budget") {
  json j = minimal_mean_config();
  j["n_samples"] = 2000;
  j["n_blocks"] = "auto(0.36787944117144233)";  // exp(-1)
  j["contamination"] = {{"model", "adversarial"},
                        {"eps_corrupt", 0.05},
                        {"strategy", "far_point_mass"},
                        {"magnitude", 100.0}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  // 16 * 100 = 1600 capped at N/2
  CHECK(cfg.resolve_n_blocks() == 1000);
}

TEST_CASE("run_campaign: point mass with no contamination is error-free") {
  json j = minimal_mean_config();
  j["distribution"] = {{"kind", "point_mass"}, {"mean", {1.0, -1.0}}};
  j["estimators"] = {"lm_mom", "coordwise_mom", "geomedian_mom", "empirical_mean"};
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  for (const TrialRecord& rec : res.records) {
    CHECK(rec.error == 0.0);
    CHECK(rec.within_bound);
  }
  for (const auto& [name, s] : res.summary.per_estimator) {
    CHECK(s.failure_fraction == 0.0);
    CHECK(s.q99 == 0.0);
  }
}

TEST_CASE("run_campaign: deterministic byte-identical CSV, also across thread counts") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(minimal_mean_config());
  const std::string csv1 = to_csv(run_campaign(cfg).records);
  const std::string csv2 = to_csv(run_campaign(cfg).records);
  CHECK(csv1 == csv2);

  setenv("ROBUST_MOM_THREADS", "3", 1);
  const std::string csv3 = to_csv(run_campaign(cfg).records);
  setenv("ROBUST_MOM_THREADS", "1", 1);
  const std::string csv4 = to_csv(run_campaign(cfg).records);
  unsetenv("ROBUST_MOM_THREADS");
  CHECK(csv3 == csv1);
  CHECK(csv4 == csv1);

  // different seed changes the records
  ExperimentConfig other = cfg;
  other.seed = 43;
  CHECK(to_csv(run_campaign(other).records) != csv1);
}

TEST_CASE("trial records: within_bound is exactly error <= bound") {
  json j = minimal_mean_config();
  j["n_trials"] = 20;
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  double failures = 0.0;
  Index lm_count = 0;
  for (const TrialRecord& rec : res.records) {
    CHECK(rec.within_bound == (rec.error <= rec.bound));
    if (rec.estimator == "lm_mom") {
      ++lm_count;
      if (!rec.within_bound) failures += 1.0;
    }
  }
  CHECK(lm_count == 20);
  CHECK(res.summary.per_estimator.at("lm_mom").failure_fraction ==
        failures / static_cast<double>(lm_count));
}

TEST_CASE("emit_csv: exact column header and row counts") {
  CHECK(to_csv({}) == "trial_id,estimator,error,bound,within_bound,certificate,wall_time_ms\n");

  std::vector<TrialRecord> recs(3);
  recs[0] = {0, "lm_mom", 0.125, 0.8, true, 0.0625, 0.0};
  recs[1] = {1, "lm_mom", 1.5, 0.8, false, 0.75, 0.0};
  recs[2] = {2, "empirical_mean", 0.1, 0.8, true, 0.0, 0.0};
  const std::string csv = to_csv(recs);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("0,lm_mom,0.125,0.8,true,0.0625,0\n") != std::string::npos);
  CHECK(csv.find("1,lm_mom,1.5,0.8,false,0.75,0\n") != std::string::npos);
}

TEST_CASE("csv floats: shortest round-trip strings reparse exactly") {
  RngStream rng(1);
  std::vector<TrialRecord> recs;
  for (int i = 0; i < 50; ++i) {
    TrialRecord r;
    r.trial_id = i;
    r.estimator = "lm_mom";
    r.error = std::exp(10.0 * rng.normal());
    r.bound = rng.uniform01();
    r.certificate = rng.normal();
    r.within_bound = r.error <= r.bound;
    recs.push_back(r);
  }
  const std::string csv = to_csv(recs);
  // reparse every float column and compare bit-for-bit
  std::size_t pos = csv.find('\n') + 1;
  for (const TrialRecord& r : recs) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    pos = end + 1;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    REQUIRE(cells.size() == 7);
    CHECK(std::strtod(cells[2].c_str(), nullptr) == r.error);
    CHECK(std::strtod(cells[3].c_str(), nullptr) == r.bound);
    CHECK(std::strtod(cells[5].c_str(), nullptr) == r.certificate);
  }
}

TEST_CASE("summary json: lossless round trip") {
  json j = minimal_mean_config();
  j["n_trials"] = 15;
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  const std::string text = to_json_text(res.summary);
  const json parsed = json::parse(text);

  CHECK(parsed.at("library_version").get<std::string>() == kVersion);
  CHECK(parsed.at("seed").get<std::uint64_t>() == 42);
  for (const auto& [name, s] : res.summary.per_estimator) {
    const json& e = parsed.at("estimators").at(name);
    CHECK(e.at("q50").get<double>() == s.q50);
    CHECK(e.at("q90").get<double>() == s.q90);
    CHECK(e.at("q95").get<double>() == s.q95);
    CHECK(e.at("q99").get<double>() == s.q99);
    CHECK(e.at("failure_fraction").get<double>() == s.failure_fraction);
    CHECK(e.at("theoretical_failure_cap").get<double>() == s.theoretical_failure_cap);
    CHECK(e.at("bound_value").get<double>() == s.bound_value);
  }
  // config echo reparses to the same normalized config
  const ExperimentConfig echoed = ExperimentConfig::from_json(parsed.at("config"));
  CHECK(echoed.to_json() == json::parse(res.summary.config_echo));
}

TEST_CASE("empirical_quantile: order-statistic definition") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  CHECK(empirical_quantile(v, 0.50) == 50.0);
  CHECK(empirical_quantile(v, 0.95) == 95.0);
  CHECK(empirical_quantile(v, 0.999) == 100.0);
  CHECK(empirical_quantile({7.0}, 0.5) == 7.0);
}

TEST_CASE("run_campaign: covariance and tukey caps populated") {
  json j{{"experiment", "covariance"},
         {"dim", 2},
         {"n_samples", 400},
         {"n_blocks", 10},
         {"n_trials", 5},
         {"seed", 7},
         {"pool", {{"n_random", 24}}},
         {"distribution", {{"kind", "gaussian"}}}};
  const CampaignResult cov = run_campaign(ExperimentConfig::from_json(j));
  CHECK(cov.summary.per_estimator.at("cov_mom").theoretical_failure_cap ==
        doctest::Approx(std::exp(-10.0 / 128.0)).epsilon(1e-12));

  json t{{"experiment", "tukey"},
         {"dim", 2},
         {"n_samples", 400},
         {"n_blocks", 16},
         {"n_trials", 5},
         {"seed", 7},
         {"distribution", {{"kind", "gaussian"}}}};
  const CampaignResult tuk = run_campaign(ExperimentConfig::from_json(t));
  CHECK(tuk.summary.per_estimator.at("tukey_mom").theoretical_failure_cap ==
        doctest::Approx(std::exp(-16.0 / 128.0)).epsilon(1e-12));
  for (const TrialRecord& rec : tuk.records) CHECK(rec.certificate >= 6.0);  // ceil(16/3)
}

TEST_CASE("run_campaign: lemma7 consistency with the majority check") {
  json j{{"experiment", "lemma7"},
         {"dim", 2},
         {"n_samples", 320},
         {"n_blocks", 16},
         {"n_trials", 10},
         {"seed", 11},
         {"pool", {{"n_random", 32}}},
         {"lemma_alpha", 2.0},
         {"distribution", {{"kind", "gaussian"}}}};
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  for (const TrialRecord& rec : res.records) {
    CHECK(rec.bound == 0.5);
    CHECK(rec.within_bound == (rec.error <= rec.bound));
  }
  CHECK(res.summary.per_estimator.at("lemma7").theoretical_failure_cap ==
        doctest::Approx(std::exp(-16.0 / 32.0)).epsilon(1e-12));

  // the harness's fraction threshold is the same predicate as
  // block_majority_check: verify the correspondence on raw block statistics
  RngStream rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const Index k = 2 + static_cast<Index>(rng.uniform_below(40));
    const double alpha = 1.5 + 2.0 * rng.uniform01();
    std::vector<bool> stats(static_cast<std::size_t>(k));
    Index bad = 0;
    for (auto&& s : stats) {
      s = rng.uniform01() < 0.4;
      if (s) ++bad;
    }
    const double frac = static_cast<double>(bad) / static_cast<double>(k);
    CHECK(robustmom::block_majority_check(stats, alpha) == (frac <= 1.0 / alpha));
  }
}

TEST_CASE("run_campaign: huber contamination with the default Q law") {
  json j = minimal_mean_config();
  j["n_samples"] = 1000;
  j["n_blocks"] = 400;  // honors K >= 16 * E|O| at eps = 0.05
  j["n_trials"] = 8;
  j["estimators"] = {"coordwise_mom", "empirical_mean"};
  j["contamination"] = {{"model", "huber"}, {"eps_corrupt", 0.05}, {"magnitude", 100.0}};
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  // a point-mass Q at distance 100 drags the empirical mean but not the MOM
  CHECK(res.summary.per_estimator.at("empirical_mean").q50 > 1.0);
  CHECK(res.summary.per_estimator.at("coordwise_mom").q50 < 1.0);

  // explicit Q law
  j["contamination"]["q_distribution"] = {{"kind", "point_mass"}, {"mean", {80.0, 0.0}}};
  const CampaignResult res2 = run_campaign(ExperimentConfig::from_json(j));
  CHECK(res2.summary.per_estimator.at("empirical_mean").q50 > 1.0);
  CHECK(res2.summary.per_estimator.at("coordwise_mom").q50 < 1.0);
}

TEST_CASE("run_campaign: contaminated pca still meets its projector bound") {
  json j{{"experiment", "pca"},
         {"dim", 3},
         {"n_samples", 1500},
         {"n_blocks", 160},  // 16 * floor(0.005 * 1500) with margin
         {"n_trials", 6},
         {"seed", 21},
         {"pca_rank", 1},
         {"pool", {{"n_random", 64}}},
         {"distribution",
          {{"kind", "gaussian"},
           {"scale", {{5.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}}},
         {"contamination",
          {{"model", "adversarial"},
           {"eps_corrupt", 0.005},
           {"strategy", "mean_shift"},
           {"magnitude", 50.0}}}};
  const CampaignResult res = run_campaign(ExperimentConfig::from_json(j));
  for (const TrialRecord& rec : res.records) {
    CHECK(rec.error <= 1.0);  // projector distance is at most sqrt(2) even when wrong
    CHECK(rec.certificate > 0.0);
  }
  CHECK(res.summary.per_estimator.at("robust_pca").failure_fraction <= 0.5);
}

TEST_CASE("run_campaign: data-hint pools and oracle-R distributions stay deterministic") {
  json j = minimal_mean_config();
  j["n_trials"] = 6;
  j["estimators"] = {"lm_mom"};
  j["pool"] = {{"n_random", 32}, {"use_data_hint", true}};
  j["distribution"] = {{"kind", "pareto"}, {"tail_index", 3.0}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const CampaignResult a = run_campaign(cfg);
  const CampaignResult b = run_campaign(cfg);
  CHECK(to_csv(a.records) == to_csv(b.records));
  // oracle-estimated R: bound close to the analytic 8*sqrt(var)*sqrt(K/N)
  const double var = 3.0 / (4.0 * 1.0);  // pareto variance at tail index 3
  const double analytic = 8.0 * std::sqrt(var) * std::sqrt(8.0 / 200.0);
  CHECK(a.summary.per_estimator.at("lm_mom").bound_value ==
        doctest::Approx(analytic).epsilon(0.25));

  json ln = minimal_mean_config();
  ln["n_trials"] = 4;
  ln["estimators"] = {"geomedian_mom"};
  ln["distribution"] = {{"kind", "lognormal"}, {"log_sigma", 0.5}};
  CHECK_NOTHROW(run_campaign(ExperimentConfig::from_json(ln)));
}

#ifdef ROBUSTMOM_CONFIG_DIR
TEST_CASE("shipped configs all parse and validate") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(ROBUSTMOM_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    INFO("config: ", entry.path().string());
    CHECK_NOTHROW(ExperimentConfig::from_json_file(entry.path()));
  }
  CHECK(seen >= 8);
}
#endif

TEST_CASE("measure_wall_time: opt-in keeps default CSV deterministic") {
  json j = minimal_mean_config();
  j["n_trials"] = 3;
  const CampaignResult silent = run_campaign(ExperimentConfig::from_json(j));
  for (const TrialRecord& rec : silent.records) CHECK(rec.wall_time_ms == 0.0);

  j["measure_wall_time"] = true;
  const CampaignResult timed = run_campaign(ExperimentConfig::from_json(j));
  bool any_positive = false;
  for (const TrialRecord& rec : timed.records)
    if (rec.wall_time_ms > 0.0) any_positive = true;
  CHECK(any_positive);
}

TEST_SUITE_END();
