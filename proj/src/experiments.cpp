#include "anchor/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "anchor/csv.hpp"
#include "anchor/estimators.hpp"
#include "anchor/moments.hpp"
#include "anchor/robustness.hpp"

namespace anchor {

namespace {

const std::set<std::string> kExperimentIds = {"robustness", "misspecified-svr",
                                              "causal-anticausal", "targeted", "custom"};

std::vector<double> default_svr_grid() {
  std::vector<double> grid(20);
  for (int i = 1; i <= 20; ++i) grid[static_cast<std::size_t>(i) - 1] = i / 20.0;
  return grid;
}

void check_svr_grid(const std::vector<double>& grid) {
  for (double x : grid) {
    if (!(x > 0.0) || x > 1.0) {
      throw std::invalid_argument(
          "experiment: signal-to-variance ratios must lie in (0, 1]; 0 means infinite proxy "
          "noise");
    }
  }
}

// W = beta^T A + s eps with s^2 = (1 - svr)/svr rescales the configured noise.
ProxyModel scaled_proxy_noise(const ProxyModel& proxies, double svr) {
  const double s2 = (1.0 - svr) / svr;
  ProxyModel out = proxies;
  out.sigma_eps_w = s2 * proxies.sigma_eps_w;
  if (proxies.has_z()) out.sigma_eps_z = s2 * proxies.sigma_eps_z;
  return out;
}

// Runs fn(replicate) -> rows over [0, m), optionally on several threads.
// Results land in per-replicate slots, so the flattened order (and therefore
// the table) does not depend on the thread count.
template <typename Fn>
void replicate_map(int m, int jobs, std::vector<ResultRow>* out, Fn fn) {
  std::vector<std::vector<ResultRow>> slots(static_cast<std::size_t>(m));
  if (jobs <= 1 || m <= 1) {
    for (int r = 0; r < m; ++r) slots[static_cast<std::size_t>(r)] = fn(r);
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= m || failed.load()) break;
        try {
          slots[static_cast<std::size_t>(r)] = fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    };
    const int threads = std::min(jobs, m);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  for (std::vector<ResultRow>& slot : slots) {
    out->insert(out->end(), slot.begin(), slot.end());
  }
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t k = sorted.size();
  if (k == 1) return sorted[0];
  const double h = p * static_cast<double>(k - 1);
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= k) return sorted[k - 1];
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

double lambda_for_shift(const Matrix& sigma_nu, const Vector& eta) {
  const Matrix s = sigma_nu + eta * eta.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  return eig.eigenvalues().maxCoeff() - 1.0;
}

std::uint64_t grid_stream(const ExperimentConfig& cfg, std::size_t n_index,
                          std::size_t grid_index) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(n_index) * 4096 +
                                   static_cast<std::uint64_t>(grid_index));
}

ResultRow make_row(const std::string& experiment, const std::string& estimator,
                   const std::string& metric, long n, double grid, long replicate,
                   std::uint64_t seed, double value) {
  ResultRow row;
  row.experiment = experiment;
  row.estimator = estimator;
  row.metric = metric;
  row.n = n;
  row.grid = grid;
  row.replicate = replicate;
  row.seed = seed;
  row.value = value;
  return row;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

double cell_value(const std::string& s) {
  return is_missing_token(s) ? std::numeric_limits<double>::quiet_NaN() : parse_double(s);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (kExperimentIds.count(id) == 0) {
    std::string known;
    for (const std::string& k : kExperimentIds) known += (known.empty() ? "" : ", ") + k;
    throw std::invalid_argument("experiment: unknown id '" + id + "' (known: " + known + ")");
  }
  if (replicates < 1) throw std::invalid_argument("experiment: replicates must be >= 1");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (sample_sizes.empty()) throw std::invalid_argument("experiment: no sample sizes given");
  for (long n : sample_sizes) {
    if (n < 2) throw std::invalid_argument("experiment: sample sizes must be >= 2");
  }
  check_svr_grid(svr_grid);
  if (!(assumed_svr > 0.0) || assumed_svr > 1.0) {
    throw std::invalid_argument("experiment: assumed_svr must lie in (0, 1]");
  }
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, long, std::string>;
  std::map<Key, std::pair<double, std::vector<double>>> cells;
  for (const ResultRow& row : rows) {
    const Key key{row.experiment, row.estimator, row.metric, row.n, format_double(row.grid)};
    auto& slot = cells[key];
    slot.first = row.grid;
    slot.second.push_back(row.value);
  }
  std::vector<SummaryRow> out;
  out.reserve(cells.size());
  for (auto& [key, slot] : cells) {
    std::vector<double>& values = slot.second;
    std::sort(values.begin(), values.end());
    SummaryRow s;
    s.experiment = std::get<0>(key);
    s.estimator = std::get<1>(key);
    s.metric = std::get<2>(key);
    s.n = std::get<3>(key);
    s.grid = slot.first;
    s.count = static_cast<long>(values.size());
    s.median = quantile_sorted(values, 0.5);
    s.q25 = quantile_sorted(values, 0.25);
    s.q75 = quantile_sorted(values, 0.75);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    s.mean = mean;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

ResultTable run_robustness_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                      const ProxyModel& proxies) {
  cfg.validate();
  if (!proxies.has_z()) {
    throw std::invalid_argument("robustness experiment: needs both proxies W and Z");
  }
  const double lambda = std::isnan(cfg.lambda) ? 5.0 : cfg.lambda;
  Vector nu = cfg.nu;
  if (nu.size() == 0) {
    nu.resize(3);
    nu << -2.83, 0.35, 0.71;
  }
  if (nu.size() != scm.d_a) {
    throw std::invalid_argument("robustness experiment: nu has length " +
                                std::to_string(nu.size()) + ", model has d_a = " +
                                std::to_string(scm.d_a));
  }
  std::vector<double> grid = cfg.svr_grid.empty() ? default_svr_grid() : cfg.svr_grid;
  check_svr_grid(grid);
  const InterventionSpec shift = InterventionSpec::deterministic(nu);
  SimulateOptions opts;
  opts.noise = cfg.noise;
  const std::string id = "robustness";

  ResultTable table;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double svr = grid[gi];
    const ProxyModel px = scaled_proxy_noise(proxies, svr);
    const MomentSet pop = population_moments(scm, &px);
    const std::pair<std::string, LinearPredictor> population_fits[] = {
        {"ols", fit_ols(pop)},
        {"ar", fit_anchor(pop, lambda)},
        {"par", fit_par(pop, lambda)},
        {"xpar", fit_xpar(pop, lambda)},
    };
    for (const auto& [name, pred] : population_fits) {
      table.rows.push_back(make_row(id, name, "population_loss", 0, svr, -1, 0,
                                    mspe_under_intervention(scm, pred, shift)));
    }
    for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
      const long n = cfg.sample_sizes[ni];
      const std::uint64_t base = grid_stream(cfg, ni, gi);
      replicate_map(cfg.replicates, cfg.jobs, &table.rows, [&](int rep) {
        const std::uint64_t train_seed = derive_seed(base, 2 * static_cast<std::uint64_t>(rep));
        const std::uint64_t test_seed =
            derive_seed(base, 2 * static_cast<std::uint64_t>(rep) + 1);
        const Dataset train =
            simulate(scm, &px, static_cast<std::size_t>(n), train_seed, opts);
        const MomentSet m = moments_from_data(train);
        const Dataset test = simulate_intervened(scm, nullptr, shift,
                                                 static_cast<std::size_t>(n), test_seed, opts);
        std::vector<ResultRow> rows;
        rows.push_back(make_row(id, "par", "mspe", n, svr, rep, train_seed,
                                empirical_mspe(fit_par(m, lambda), test)));
        rows.push_back(make_row(id, "xpar", "mspe", n, svr, rep, train_seed,
                                empirical_mspe(fit_xpar(m, lambda), test)));
        return rows;
      });
    }
  }
  table.summaries = summarize(table.rows);
  return table;
}

ResultTable run_misspecification_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                            const ProxyModel& proxies) {
  cfg.validate();
  const double lambda = std::isnan(cfg.lambda) ? 5.0 : cfg.lambda;
  std::vector<double> grid = cfg.svr_grid.empty() ? default_svr_grid() : cfg.svr_grid;
  check_svr_grid(grid);
  SimulateOptions opts;
  opts.noise = cfg.noise;
  const std::string id = "misspecified-svr";
  const RobustnessSet claimed = build_set(SetKind::kAnchor, scm.sigma_a, cfg.assumed_svr * lambda);

  ResultTable table;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double svr = grid[gi];
    const ProxyModel px = scaled_proxy_noise(proxies, svr);
    for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
      const long n = cfg.sample_sizes[ni];
      const std::uint64_t base = grid_stream(cfg, ni, gi);
      replicate_map(cfg.replicates, cfg.jobs, &table.rows, [&](int rep) {
        const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(rep));
        const Dataset train = simulate(scm, &px, static_cast<std::size_t>(n), seed, opts);
        const MomentSet m = moments_from_data(train);
        const auto [estimated, actual] =
            estimated_vs_actual_worst_case(scm, px, lambda, cfg.assumed_svr, &m);
        const WorstCase ols_case = worst_case_mspe(scm, fit_ols(m), claimed);
        std::vector<ResultRow> rows;
        rows.push_back(make_row(id, "par", "estimated_worst_case", n, svr, rep, seed, estimated));
        rows.push_back(make_row(id, "par", "actual_worst_case", n, svr, rep, seed, actual));
        rows.push_back(
            make_row(id, "ols", "actual_worst_case", n, svr, rep, seed, ols_case.value));
        return rows;
      });
    }
  }
  table.summaries = summarize(table.rows);
  return table;
}

ResultTable run_causal_anticausal_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                                             const ProxyModel& proxies) {
  cfg.validate();
  if (!proxies.has_z()) {
    throw std::invalid_argument("causal-anticausal experiment: needs both proxies W and Z");
  }
  if (scm.d_x % 2 != 0) {
    throw std::invalid_argument(
        "causal-anticausal experiment: expects the first half of X causal and the second half "
        "anti-causal, so d_x must be even");
  }
  const double lambda = std::isnan(cfg.lambda) ? 2.0 : cfg.lambda;
  const Eigen::Index half = scm.d_x / 2;
  SimulateOptions opts;
  opts.noise = cfg.noise;
  const std::string id = "causal-anticausal";

  ResultTable table;
  for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
    const long n = cfg.sample_sizes[ni];
    const std::uint64_t base = grid_stream(cfg, ni, 0);
    replicate_map(cfg.replicates, cfg.jobs, &table.rows, [&](int rep) {
      const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(rep));
      const Dataset train = simulate(scm, &proxies, static_cast<std::size_t>(n), seed, opts);
      const MomentSet m = moments_from_data(train);
      const std::pair<std::string, LinearPredictor> fits[] = {
          {"par", fit_par(m, lambda)},
          {"xpar", fit_xpar(m, lambda)},
      };
      std::vector<ResultRow> rows;
      for (const auto& [name, pred] : fits) {
        const double causal = pred.gamma.head(half).cwiseAbs().mean();
        const double anti = pred.gamma.tail(half).cwiseAbs().mean();
        rows.push_back(make_row(id, name, "mean_abs_causal", n,
                                std::numeric_limits<double>::quiet_NaN(), rep, seed, causal));
        rows.push_back(make_row(id, name, "mean_abs_anticausal", n,
                                std::numeric_limits<double>::quiet_NaN(), rep, seed, anti));
      }
      return rows;
    });
  }
  table.summaries = summarize(table.rows);
  return table;
}

ResultTable run_targeted_experiment(const ExperimentConfig& cfg, const LinearScm& scm) {
  cfg.validate();
  Matrix kappa = cfg.kappa;
  Vector eta = cfg.eta;
  if (kappa.size() == 0) {
    kappa = Matrix::Zero(2, 2);
    kappa(0, 0) = std::sqrt(2.0);
    kappa(1, 1) = 1.0;
  }
  if (eta.size() == 0) {
    eta.resize(2);
    eta << 0.0, 2.0;
  }
  if (kappa.rows() != scm.d_a || kappa.cols() != scm.d_a || eta.size() != scm.d_a) {
    throw std::invalid_argument("targeted experiment: kappa/eta dimensions must equal d_a");
  }
  const Matrix sigma_nu_raw = kappa.transpose() * scm.sigma_a * kappa;
  const Matrix sigma_nu = 0.5 * (sigma_nu_raw + sigma_nu_raw.transpose());
  const double lambda = std::isnan(cfg.lambda) ? lambda_for_shift(sigma_nu, eta) : cfg.lambda;
  const InterventionSpec shift = InterventionSpec::random(eta, sigma_nu);
  SimulateOptions opts;
  opts.noise = cfg.noise;
  const std::string id = "targeted";

  ResultTable table;
  for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
    const long n = cfg.sample_sizes[ni];
    const std::uint64_t base = grid_stream(cfg, ni, 0);
    replicate_map(cfg.replicates, cfg.jobs, &table.rows, [&](int rep) {
      const std::uint64_t train_seed = derive_seed(base, 3 * static_cast<std::uint64_t>(rep));
      const std::uint64_t shift_seed =
          derive_seed(base, 3 * static_cast<std::uint64_t>(rep) + 1);
      const std::uint64_t plain_seed =
          derive_seed(base, 3 * static_cast<std::uint64_t>(rep) + 2);
      const Dataset train =
          simulate(scm, nullptr, static_cast<std::size_t>(n), train_seed, opts);
      const MomentSet m = moments_from_data(train);
      const Dataset test_shift = simulate_intervened(scm, nullptr, shift,
                                                     static_cast<std::size_t>(n), shift_seed, opts);
      const Dataset test_plain =
          simulate(scm, nullptr, static_cast<std::size_t>(n), plain_seed, opts);
      const std::pair<std::string, LinearPredictor> fits[] = {
          {"ols", fit_ols(m)},
          {"ar", fit_anchor(m, lambda)},
          {"tar", fit_tar(m, eta, sigma_nu)},
      };
      std::vector<ResultRow> rows;
      for (const auto& [name, pred] : fits) {
        rows.push_back(make_row(id, name, "mspe_shifted", n,
                                std::numeric_limits<double>::quiet_NaN(), rep, train_seed,
                                empirical_mspe(pred, test_shift)));
        rows.push_back(make_row(id, name, "mspe_training", n,
                                std::numeric_limits<double>::quiet_NaN(), rep, train_seed,
                                empirical_mspe(pred, test_plain)));
      }
      return rows;
    });
  }
  table.summaries = summarize(table.rows);
  return table;
}

ResultTable run_experiment(const ExperimentConfig& cfg, const LinearScm& scm,
                           const ProxyModel* proxies) {
  cfg.validate();
  if (cfg.id == "targeted") return run_targeted_experiment(cfg, scm);
  if (cfg.id == "custom") {
    throw std::invalid_argument(
        "experiment: 'custom' studies are compositions of library calls (simulate / fit / "
        "evaluate / worst-case); the harness runs the four named studies");
  }
  if (proxies == nullptr) {
    throw std::invalid_argument("experiment: '" + cfg.id + "' needs a proxy model");
  }
  if (cfg.id == "robustness") return run_robustness_experiment(cfg, scm, *proxies);
  if (cfg.id == "misspecified-svr") return run_misspecification_experiment(cfg, scm, *proxies);
  return run_causal_anticausal_experiment(cfg, scm, *proxies);
}

Matrix make_noisy_proxies(const Vector& column, double target_svr, int count,
                          std::uint64_t seed) {
  if (!(target_svr > 0.0) || !(target_svr < 1.0)) {
    throw std::invalid_argument("make_noisy_proxies: target_svr must lie in (0, 1)");
  }
  if (count < 1 || count > 2) {
    throw std::invalid_argument("make_noisy_proxies: count must be 1 or 2");
  }
  const auto n = column.size();
  if (n < 2) throw std::invalid_argument("make_noisy_proxies: column too short");
  const double mean = column.mean();
  const double var = (column.array() - mean).square().sum() / static_cast<double>(n);
  if (!(var > 0.0)) {
    throw std::domain_error("make_noisy_proxies: column is constant, its ratio is undefined");
  }
  const double noise_sd = std::sqrt(var * (1.0 - target_svr) / target_svr);
  NoiseSampler sampler(NoiseKind::kGaussian, seed);
  Matrix out = noise_sd * sampler.draw_matrix(n, count);
  out.colwise() += column;
  return out;
}

double loog_cv_lambda(const Dataset& data, const std::vector<double>& lambda_grid, Method method,
                      std::vector<double>* fold_means) {
  if (lambda_grid.empty()) {
    throw std::invalid_argument("loog_cv_lambda: empty lambda grid");
  }
  if (method != Method::kAnchor && method != Method::kPar && method != Method::kXpar) {
    throw std::invalid_argument("loog_cv_lambda: method must be ar, par, or xpar");
  }
  if (!data.has_group()) {
    throw std::invalid_argument("loog_cv_lambda: dataset has no group labels");
  }
  std::set<std::string> labels(data.group.begin(), data.group.end());
  if (labels.size() < 2) {
    throw std::invalid_argument("loog_cv_lambda: needs at least 2 groups");
  }

  struct Fold {
    MomentSet train;
    Dataset valid;
  };
  std::vector<Fold> folds;
  folds.reserve(labels.size());
  for (const std::string& g : labels) {
    Fold fold;
    fold.train = moments_from_data(data.filter_by_group(g, false), true);
    fold.valid = data.filter_by_group(g, true);
    folds.push_back(std::move(fold));
  }

  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());
  if (fold_means != nullptr) fold_means->clear();
  double best_lambda = grid.front();
  double best_loss = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double total = 0.0;
    for (const Fold& fold : folds) {
      LinearPredictor pred;
      switch (method) {
        case Method::kAnchor:
          pred = fit_anchor(fold.train, lambda);
          break;
        case Method::kPar:
          pred = fit_par(fold.train, lambda);
          break;
        default:
          pred = fit_xpar(fold.train, lambda);
          break;
      }
      total += empirical_mspe(pred, fold.valid);
    }
    const double loss = total / static_cast<double>(folds.size());
    if (fold_means != nullptr) fold_means->push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

namespace {

const char* const kCsvHeader =
    "kind,experiment,estimator,metric,n,grid,replicate,seed,value,count,median,q25,q75,mean,sd";

void write_csv(const ResultTable& table, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const ResultRow& r : table.rows) {
    out << "raw," << r.experiment << ',' << r.estimator << ',' << r.metric << ',' << r.n << ','
        << cell(r.grid) << ',' << r.replicate << ',' << r.seed << ',' << format_double(r.value)
        << ",,,,,,\n";
  }
  for (const SummaryRow& s : table.summaries) {
    out << "summary," << s.experiment << ',' << s.estimator << ',' << s.metric << ',' << s.n
        << ',' << cell(s.grid) << ",,,," << s.count << ',' << format_double(s.median) << ','
        << format_double(s.q25) << ',' << format_double(s.q75) << ',' << format_double(s.mean)
        << ',' << format_double(s.sd) << "\n";
  }
}

nlohmann::json row_json(const ResultRow& r) {
  return nlohmann::json{{"experiment", r.experiment}, {"estimator", r.estimator},
                        {"metric", r.metric},         {"n", r.n},
                        {"grid", r.grid},             {"replicate", r.replicate},
                        {"seed", r.seed},             {"value", r.value}};
}

nlohmann::json summary_json(const SummaryRow& s) {
  return nlohmann::json{{"experiment", s.experiment},
                        {"estimator", s.estimator},
                        {"metric", s.metric},
                        {"n", s.n},
                        {"grid", s.grid},
                        {"count", s.count},
                        {"median", s.median},
                        {"q25", s.q25},
                        {"q75", s.q75},
                        {"mean", s.mean},
                        {"sd", s.sd}};
}

double json_number(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void emit_results(const ResultTable& table, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    write_csv(table, out);
  } else if (format == "json") {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const ResultRow& r : table.rows) j["rows"].push_back(row_json(r));
    j["summaries"] = nlohmann::json::array();
    for (const SummaryRow& s : table.summaries) j["summaries"].push_back(summary_json(s));
    out << j.dump(2) << "\n";
  } else {
    throw std::invalid_argument("emit_results: format must be csv or json, got '" + format + "'");
  }
}

void emit_results(const ResultTable& table, const std::string& format, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("emit_results: cannot open '" + path + "' for writing");
  }
  emit_results(table, format, out);
  if (!out.good()) {
    throw std::runtime_error("emit_results: write to '" + path + "' failed");
  }
}

ResultTable read_result_table(const std::string& path, const std::string& format) {
  ResultTable table;
  if (format == "csv") {
    const RawTable raw = read_raw_csv(path);
    const std::size_t kind = raw.column_index("kind");
    const std::size_t experiment = raw.column_index("experiment");
    const std::size_t estimator = raw.column_index("estimator");
    const std::size_t metric = raw.column_index("metric");
    const std::size_t n_col = raw.column_index("n");
    const std::size_t grid = raw.column_index("grid");
    const std::size_t replicate = raw.column_index("replicate");
    const std::size_t seed = raw.column_index("seed");
    const std::size_t value = raw.column_index("value");
    const std::size_t count = raw.column_index("count");
    const std::size_t median = raw.column_index("median");
    const std::size_t q25 = raw.column_index("q25");
    const std::size_t q75 = raw.column_index("q75");
    const std::size_t mean = raw.column_index("mean");
    const std::size_t sd = raw.column_index("sd");
    for (const std::vector<std::string>& cells : raw.rows) {
      if (cells[kind] == "raw") {
        ResultRow r;
        r.experiment = cells[experiment];
        r.estimator = cells[estimator];
        r.metric = cells[metric];
        r.n = std::stol(cells[n_col]);
        r.grid = cell_value(cells[grid]);
        r.replicate = std::stol(cells[replicate]);
        r.seed = std::stoull(cells[seed]);
        r.value = parse_double(cells[value]);
        table.rows.push_back(std::move(r));
      } else if (cells[kind] == "summary") {
        SummaryRow s;
        s.experiment = cells[experiment];
        s.estimator = cells[estimator];
        s.metric = cells[metric];
        s.n = std::stol(cells[n_col]);
        s.grid = cell_value(cells[grid]);
        s.count = std::stol(cells[count]);
        s.median = parse_double(cells[median]);
        s.q25 = parse_double(cells[q25]);
        s.q75 = parse_double(cells[q75]);
        s.mean = parse_double(cells[mean]);
        s.sd = parse_double(cells[sd]);
        table.summaries.push_back(std::move(s));
      } else {
        throw std::runtime_error("read_result_table: unknown row kind '" + cells[kind] + "'");
      }
    }
    return table;
  }
  if (format != "json") {
    throw std::invalid_argument("read_result_table: format must be csv or json");
  }
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_result_table: cannot open '" + path + "'");
  }
  nlohmann::json j;
  in >> j;
  for (const nlohmann::json& rj : j.at("rows")) {
    ResultRow r;
    r.experiment = rj.at("experiment").get<std::string>();
    r.estimator = rj.at("estimator").get<std::string>();
    r.metric = rj.at("metric").get<std::string>();
    r.n = rj.at("n").get<long>();
    r.grid = json_number(rj.at("grid"));
    r.replicate = rj.at("replicate").get<long>();
    r.seed = rj.at("seed").get<std::uint64_t>();
    r.value = rj.at("value").get<double>();
    table.rows.push_back(std::move(r));
  }
  for (const nlohmann::json& sj : j.at("summaries")) {
    SummaryRow s;
    s.experiment = sj.at("experiment").get<std::string>();
    s.estimator = sj.at("estimator").get<std::string>();
    s.metric = sj.at("metric").get<std::string>();
    s.n = sj.at("n").get<long>();
    s.grid = json_number(sj.at("grid"));
    s.count = sj.at("count").get<long>();
    s.median = sj.at("median").get<double>();
    s.q25 = sj.at("q25").get<double>();
    s.q75 = sj.at("q75").get<double>();
    s.mean = sj.at("mean").get<double>();
    s.sd = sj.at("sd").get<double>();
    table.summaries.push_back(std::move(s));
  }
  return table;
}

}  // namespace anchor
