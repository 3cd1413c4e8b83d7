#pragma once

// Monte Carlo harness for the four synthetic studies plus the real-data
// pipeline mechanics (proxy synthesis at a chosen signal-to-variance ratio,
// leave-one-group-out cross-validation over lambda).
//
// Experiment ids:
//   robustness        proxy fits at lambda = 5 under a sweep of proxy noise
//                     levels, evaluated on a fixed anchor intervention
//   misspecified-svr  estimated vs actual worst case when the assumed
//                     signal-to-variance ratio is wrong
//   causal-anticausal coefficient weight placed on causal vs anti-causal
//                     features by one- and two-proxy fits
//   targeted          OLS / anchor / targeted fits under an anticipated mean
//                     and covariance shift
//
// Every raw result row carries the seed that produced it; rerunning a config
// reproduces the table exactly, independent of the jobs setting.

#include <cstdint>
#include <string>
#include <vector>

#include "anchor/dataset.hpp"
#include "anchor/predictor.hpp"
#include "anchor/scm.hpp"

namespace anchor {

struct ExperimentConfig {
  std::string id = "robustness";
  int replicates = 200;
  std::vector<long> sample_sizes = {10000};
  // NaN selects the experiment default: 5 for robustness and
  // misspecified-svr, 2 for causal-anticausal; targeted derives lambda from
  // the anticipated shift unless one is given here.
  double lambda = std::numeric_limits<double>::quiet_NaN();
  // Signal-to-variance grid for the two proxy-noise sweeps; empty means
  // {0.05, 0.10, ..., 1.00}. Zero is rejected (infinite noise).
  std::vector<double> svr_grid;
  std::uint64_t seed = 1;
  int jobs = 1;
  NoiseKind noise = NoiseKind::kGaussian;

  // robustness: deterministic test intervention; empty -> (-2.83, 0.35, 0.71).
  Vector nu;
  // misspecified-svr: the ratio the analyst assumes.
  double assumed_svr = 0.4;
  // targeted: anticipated shift A -> kappa^T A + eta; empty kappa/eta default
  // to diag(sqrt(2), 1) and (0, 2).
  Matrix kappa;
  Vector eta;

  // Throws std::invalid_argument on an unknown id, replicates < 1, empty or
  // out-of-range grids, or sample sizes < 2.
  void validate() const;
};

struct ResultRow {
  std::string experiment;
  std::string estimator;
  std::string metric;
  long n = 0;               // training sample size; 0 for population rows
  double grid = std::numeric_limits<double>::quiet_NaN();
  long replicate = -1;      // -1 marks population (non-simulated) rows
  std::uint64_t seed = 0;
  double value = 0.0;
};

struct SummaryRow {
  std::string experiment;
  std::string estimator;
  std::string metric;
  long n = 0;
  double grid = std::numeric_limits<double>::quiet_NaN();
  long count = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summaries;
};

// Median and quartiles (linear interpolation between order statistics), mean
// and standard deviation per (experiment, estimator, metric, n, grid) cell.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// Per (n, svr): fits one- and two-proxy estimators on fresh training draws,
// scores them on test draws from do(A := nu), and adds population losses for
// ols / ar / par / xpar at the same noise level (replicate -1, n 0). The
// configured proxy noise covariances are scaled by s^2 = (1 - svr)/svr.
ResultTable run_robustness_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                      const ProxyModel& proxies);

// Per (true svr): single-proxy fit at cfg.lambda whose objective value is
// read as a worst-case claim under cfg.assumed_svr, compared with the actual
// worst case of the fitted coefficients over that set; the actual worst case
// of OLS is included for reference.
ResultTable run_misspecification_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                            const ProxyModel& proxies);

// Mean absolute coefficient weight on the causal half (first d_x/2 features)
// vs the anti-causal half for one- and two-proxy fits.
ResultTable run_causal_anticausal_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                             const ProxyModel& proxies);

// OLS / anchor / targeted fits evaluated on test draws from the anticipated
// shift and from the training distribution. The anchor lambda solves
// 1 + lambda = lambda_max(kappa^T Sigma_A kappa + eta eta^T).
ResultTable run_targeted_experiment(const ExperimentConfig& cfg, const LinearScm& scm);

// Dispatch on cfg.id. proxies may be null only for the targeted experiment.
ResultTable run_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                           const ProxyModel* proxies);

// Independent Gaussian noise with variance var(column) * (1 - svr)/svr added
// to each of `count` copies of the column, so the population-style variance
// ratio var(column)/var(proxy) equals svr in expectation. Throws on a
// constant column or svr outside (0, 1).
Matrix make_noisy_proxies(const Vector& column, double target_svr, int count,
                          std::uint64_t seed);

// Leave-one-group-out cross-validation: for each lambda, train on all groups
// but one (centered moments, so fits carry intercepts), validate on the
// held-out group, and average the validation MSPE over folds without
// weighting. Returns the lambda with the smallest average, ties broken
// toward the smallest lambda. fold_means, when given, receives the average
// per grid entry in ascending-lambda order. method must be ar, par, or xpar.
double loog_cv_lambda(const Dataset& data, const std::vector<double>& lambda_grid, Method method,
                      std::vector<double>* fold_means = nullptr);

// Writes raw and summary rows. format "csv" puts both in one file with a
// leading `kind` column; "json" writes {"rows": [...], "summaries": [...]}.
// Doubles are written with 17 significant digits so reading back is exact.
void emit_results(const ResultTable& table, const std::string& format, const std::string& path);
void emit_results(const ResultTable& table, const std::string& format, std::ostream& out);

ResultTable read_result_table(const std::string& path, const std::string& format);

}  // namespace anchor
