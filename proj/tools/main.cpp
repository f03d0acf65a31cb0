// robustmom CLI: Monte Carlo campaigns, one-shot estimates, depth queries and
// bound evaluation for the median-of-means estimator library.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "robustmom/covariance.hpp"
#include "robustmom/depth.hpp"
#include "robustmom/harness.hpp"
#include "robustmom/mean.hpp"
#include "robustmom/types.hpp"

using nlohmann::json;
using namespace robustmom;

namespace {

Matrix read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw ConfigError("non-numeric cell '" + cell + "' in " + path.string());
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("no data rows in " + path.string());
  const auto d = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      throw ConfigError("ragged rows in " + path.string());
    for (std::size_t j = 0; j < d; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

Vector parse_comma_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (...) {
      throw ConfigError("could not parse number '" + cell + "'");
    }
  }
  if (vals.empty()) throw ConfigError("empty vector argument");
  Vector v(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
  return v;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
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

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed_override) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const CampaignResult result = run_campaign(cfg);
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  emit_csv(result.records, dir / "trials.csv");
  emit_json(result.summary, dir / "summary.json");
  std::cerr << "wrote " << (dir / "trials.csv").string() << " and "
            << (dir / "summary.json").string() << "\n";
  for (const auto& [name, s] : result.summary.per_estimator)
    std::cerr << "  " << name << ": q50=" << format_double(s.q50)
              << " q95=" << format_double(s.q95)
              << " failure_fraction=" << format_double(s.failure_fraction)
              << " cap=" << format_double(s.theoretical_failure_cap) << "\n";
  return 0;
}

int cmd_depth(const std::string& points_path, const std::string& eta_text,
              const std::string& method, Index n_dirs, std::uint64_t seed) {
  const Matrix pts = read_numeric_csv(points_path);
  const Vector eta = parse_comma_vector(eta_text);
  if (eta.size() != pts.cols())
    throw ConfigError("eta dimension does not match the data");

  std::string chosen = method;
  if (chosen.empty())
    chosen = (pts.cols() == 1) ? "1d" : (pts.cols() == 2) ? "exact2d" : "random";

  DepthResult res;
  if (chosen == "1d") {
    if (pts.cols() != 1) throw ConfigError("--method 1d requires 1-D data");
    std::vector<double> xs(static_cast<std::size_t>(pts.rows()));
    for (Index i = 0; i < pts.rows(); ++i) xs[static_cast<std::size_t>(i)] = pts(i, 0);
    res = depth_1d(xs, eta[0]);
  } else if (chosen == "exact2d") {
    if (pts.cols() != 2) throw ConfigError("--method exact2d requires 2-D data");
    std::vector<Vector> points(static_cast<std::size_t>(pts.rows()));
    for (Index i = 0; i < pts.rows(); ++i)
      points[static_cast<std::size_t>(i)] = pts.row(i).transpose();
    res = depth_exact_2d(points, eta);
  } else if (chosen == "random") {
    std::vector<Vector> points(static_cast<std::size_t>(pts.rows()));
    for (Index i = 0; i < pts.rows(); ++i)
      points[static_cast<std::size_t>(i)] = pts.row(i).transpose();
    res = depth_randomized(points, eta, n_dirs, RngStream(seed));
  } else {
    throw ConfigError("unknown depth method '" + chosen + "'");
  }
  json out;
  out["depth"] = res.depth;
  out["depth_fraction"] = res.depth_fraction;
  out["witness_direction"] = vector_to_json(res.witness_direction);
  out["method"] = chosen;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_estimate(const std::string& data_path, const std::string& estimator, Index blocks,
                 std::uint64_t seed, Index pool_random, const std::string& center) {
  const Dataset data = Dataset::make(read_numeric_csv(data_path));
  RngStream rng(seed);
  json out;
  out["estimator"] = estimator;
  out["n_blocks"] = blocks;
  if (estimator == "lm_mom" || estimator == "cov_mom") {
    const DirectionPool pool =
        make_direction_pool(data.dim(), pool_random, &data, rng.derive(0x70));
    if (estimator == "lm_mom") {
      const MeanEstimate est = lm_mom_estimate(data, blocks, pool, {}, rng);
      out["point"] = vector_to_json(est.point);
      out["achieved_eps"] = est.achieved_eps;
      out["iterations"] = est.iterations;
      out["pool_size"] = est.pool_size;
    } else {
      CovMomOptions opts;
      if (center == "mom_mean")
        opts.center = CovCenter::mom_mean;
      else if (center != "none")
        throw ConfigError("--center must be none or mom_mean");
      const CovEstimate est = cov_mom_estimate(data, blocks, pool, opts, rng);
      out["matrix"] = matrix_to_json(est.matrix.m);
      out["achieved_eps"] = est.achieved_eps;
      out["centered"] = est.centered;
      if (est.mean_used) out["mean_used"] = vector_to_json(*est.mean_used);
    }
  } else if (estimator == "coordwise_mom") {
    out["point"] = vector_to_json(coordinatewise_mom(data, blocks, rng));
  } else if (estimator == "geomedian_mom") {
    out["point"] = vector_to_json(geomedian_mom(data, blocks, rng));
  } else if (estimator == "tukey_mom") {
    const TukeyMomEstimate est = tukey_mom(data, blocks, rng);
    out["point"] = vector_to_json(est.point);
    out["depth"] = est.depth;
    out["method"] = to_string(est.method);
    out["candidates_evaluated"] = est.candidates_evaluated;
  } else if (estimator == "empirical_mean") {
    out["point"] = vector_to_json(empirical_mean(data));
  } else {
    throw ConfigError("unknown estimator '" + estimator + "'");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_bounds(const std::string& experiment, double r, Index k, Index n, Index dim,
               double gap) {
  double value = 0.0;
  if (experiment == "mean") {
    value = mean_error_bound(BoundInputs{r, k, n, dim});
  } else if (experiment == "covariance") {
    value = cov_error_bound(r, k, n);
  } else if (experiment == "tukey") {
    value = tukey_error_bound(r, k, n, dim);
  } else if (experiment == "pca") {
    if (!(gap > 0.0)) throw ConfigError("--gap must be > 0 for pca bounds");
    value = 8.0 / gap * r *
            std::sqrt(static_cast<double>(k) / static_cast<double>(n));
  } else {
    throw ConfigError("unknown experiment '" + experiment + "' (mean|covariance|tukey|pca)");
  }
  std::cout << format_double(value) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust median-of-means estimators and Monte Carlo benchmark harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a Monte Carlo campaign from a JSON config");
  std::string config_path, out_dir = ".";
  std::uint64_t seed_val = 0;
  bool seed_given = false;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "output directory (trials.csv, summary.json)");
  run->add_option("--seed", seed_val, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* depth = app.add_subcommand("depth", "halfspace depth of a point");
  std::string points_path, eta_text, method;
  Index n_dirs = 512;
  std::uint64_t depth_seed = 1;
  depth->add_option("--points", points_path, "CSV of points, one row each")->required();
  depth->add_option("--eta", eta_text, "query point, comma separated")->required();
  depth->add_option("--method", method, "exact2d|random|1d (default by dimension)");
  depth->add_option("--n-dirs", n_dirs, "directions for --method random");
  depth->add_option("--seed", depth_seed, "seed for --method random");

  auto* estimate = app.add_subcommand("estimate", "one-shot estimate from a CSV dataset");
  std::string data_path, estimator_name, center = "none";
  Index blocks = 0, pool_random = 256;
  std::uint64_t est_seed = 1;
  estimate->add_option("--data", data_path, "CSV dataset, one sample per row")->required();
  estimate->add_option("--estimator", estimator_name,
                       "lm_mom|coordwise_mom|geomedian_mom|tukey_mom|empirical_mean|cov_mom")
      ->required();
  estimate->add_option("--blocks", blocks, "number of blocks K")->required();
  estimate->add_option("--seed", est_seed, "RNG seed");
  estimate->add_option("--pool-random", pool_random, "random directions in the pool");
  estimate->add_option("--center", center, "cov_mom centering: none|mom_mean");

  auto* bounds = app.add_subcommand("bounds", "evaluate a concentration bound");
  std::string bounds_experiment;
  double r_val = 0.0, gap = 0.0;
  Index bk = 0, bn = 0, bdim = 1;
  bounds->add_option("--experiment", bounds_experiment, "mean|covariance|tukey|pca")->required();
  bounds->add_option("--r", r_val, "weak variance term R (sigma for covariance/pca)")->required();
  bounds->add_option("--k", bk, "number of blocks K")->required();
  bounds->add_option("--n", bn, "sample count N")->required();
  bounds->add_option("--dim", bdim, "dimension d (tukey)");
  bounds->add_option("--gap", gap, "spectral gap (pca)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out_dir,
                     seed_given ? std::optional<std::uint64_t>(seed_val) : std::nullopt);
    if (depth->parsed()) return cmd_depth(points_path, eta_text, method, n_dirs, depth_seed);
    if (estimate->parsed())
      return cmd_estimate(data_path, estimator_name, blocks, est_seed, pool_random, center);
    if (bounds->parsed()) return cmd_bounds(bounds_experiment, r_val, bk, bn, bdim, gap);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
