#include "anchor/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anchor/config.hpp"
#include "anchor/csv.hpp"
#include "anchor/estimators.hpp"
#include "anchor/experiments.hpp"
#include "anchor/identifiability.hpp"
#include "anchor/ingest.hpp"
#include "anchor/robustness.hpp"

namespace anchor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("ANCHOR_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return std::string(dir) + "/" + path;
}

Vector vector_from_list(const std::vector<double>& values) {
  Vector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

// "a,b;c,d" -> 2x2 matrix, rows separated by ';'.
Matrix matrix_from_arg(const std::string& text, const std::string& flag) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row_text;
  while (std::getline(ss, row_text, ';')) {
    std::vector<double> row;
    std::stringstream rs(row_text);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      try {
        row.push_back(parse_double(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument(flag + ": cannot parse '" + cell + "' as a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(flag + ": empty matrix");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw std::invalid_argument(flag + ": rows have unequal lengths");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return out;
}

Dataset load_dataset(const std::string& data_path, const std::string& schema_path,
                     IngestReport* report) {
  if (schema_path.empty()) return read_dataset_csv(data_path);
  return ingest_csv(data_path, IngestSchema::from_json_file(schema_path), report);
}

struct SimulateArgs {
  std::string scm;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string noise = "gaussian";
  std::vector<double> intervene;
  std::string intervene_cov;
  bool no_anchors = false;
  bool keep_hidden = false;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const ScmConfig cfg = load_scm_config(a.scm);
  SimulateOptions options;
  options.noise = noise_kind_from_name(a.noise);
  options.keep_anchors = !a.no_anchors;
  options.keep_hidden = a.keep_hidden;
  const ProxyModel* proxies = cfg.proxies.has_value() ? &*cfg.proxies : nullptr;
  Dataset data;
  if (!a.intervene.empty()) {
    const Vector nu = vector_from_list(a.intervene);
    InterventionSpec spec = a.intervene_cov.empty()
                                ? InterventionSpec::deterministic(nu)
                                : InterventionSpec::random(
                                      nu, matrix_from_arg(a.intervene_cov, "--intervene-cov"));
    data = simulate_intervened(cfg.scm, proxies, spec, a.n, a.seed, options);
  } else {
    if (!a.intervene_cov.empty()) {
      throw std::invalid_argument("--intervene-cov needs --intervene for the mean");
    }
    data = simulate(cfg.scm, proxies, a.n, a.seed, options);
  }
  const std::string path = resolve_out(a.out_path);
  write_dataset_csv(data, path);
  out << "wrote " << data.n() << " rows to " << path << "\n";
  return 0;
}

struct FitArgs {
  std::string method = "ols";
  double lambda = kNaN;
  std::string data;
  std::string schema;
  bool centered = false;
  std::vector<double> target_mean;
  std::string target_cov;
  std::string out_path;
};

int do_fit(const FitArgs& a, std::ostream& out) {
  const Dataset data = load_dataset(a.data, a.schema, nullptr);
  const MomentSet m = moments_from_data(data, a.centered);
  const Method method = method_from_name(a.method);
  auto need_lambda = [&]() {
    if (std::isnan(a.lambda)) {
      throw std::invalid_argument("fit: --lambda is required for method " + a.method);
    }
    return a.lambda;
  };
  auto need_target = [&]() {
    if (a.target_mean.empty() || a.target_cov.empty()) {
      throw std::invalid_argument("fit: --target-mean and --target-cov are required for method " +
                                  a.method);
    }
    return std::make_pair(vector_from_list(a.target_mean),
                          matrix_from_arg(a.target_cov, "--target-cov"));
  };
  LinearPredictor predictor;
  switch (method) {
    case Method::kOls:
      predictor = fit_ols(m);
      break;
    case Method::kAnchor:
      predictor = fit_anchor(m, need_lambda());
      break;
    case Method::kPar:
      predictor = fit_par(m, need_lambda());
      break;
    case Method::kXpar:
      predictor = fit_xpar(m, need_lambda());
      break;
    case Method::kTar: {
      const auto [mu, cov] = need_target();
      predictor = fit_tar(m, mu, cov);
      break;
    }
    case Method::kPtar: {
      const auto [mu, cov] = need_target();
      predictor = fit_ptar(m, mu, cov);
      break;
    }
    case Method::kXtar: {
      const auto [mu, cov] = need_target();
      predictor = fit_xtar(m, mu, cov);
      break;
    }
  }
  if (a.out_path.empty()) {
    out << predictor_to_json_text(predictor);
  } else {
    const std::string path = resolve_out(a.out_path);
    save_predictor(predictor, path);
    out << "wrote predictor to " << path << "\n";
  }
  return 0;
}

struct EvaluateArgs {
  std::string predictor;
  std::string data;
  std::string schema;
  std::string format = "csv";
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const LinearPredictor predictor = load_predictor(a.predictor);
  const Dataset data = load_dataset(a.data, a.schema, nullptr);
  const double mspe = empirical_mspe(predictor, data);
  if (a.format == "json") {
    nlohmann::json j{{"mspe", mspe}, {"n", data.n()}};
    out << j.dump(2) << "\n";
  } else {
    out << "metric,value\nmspe," << format_double(mspe) << "\nn," << data.n() << "\n";
  }
  return 0;
}

struct WorstCaseArgs {
  std::string scm;
  std::string predictor;
  std::string set = "ar";
  double lambda = kNaN;
  std::string format = "csv";
};

int do_worst_case(const WorstCaseArgs& a, std::ostream& out) {
  const ScmConfig cfg = load_scm_config(a.scm);
  const LinearPredictor predictor = load_predictor(a.predictor);
  RobustnessSet set;
  if (a.set == "ols") {
    set = build_set(SetKind::kOls, cfg.scm.sigma_a, 0.0);
  } else if (a.set == "ar") {
    if (std::isnan(a.lambda)) {
      throw std::invalid_argument("worst-case: --lambda is required for --set ar");
    }
    set = build_set(SetKind::kAnchor, cfg.scm.sigma_a, a.lambda);
  } else if (a.set == "par") {
    if (std::isnan(a.lambda)) {
      throw std::invalid_argument("worst-case: --lambda is required for --set par");
    }
    if (!cfg.proxies.has_value()) {
      throw std::invalid_argument("worst-case: --set par needs a proxy block in the model config");
    }
    const Matrix saw = cfg.scm.sigma_a * cfg.proxies->beta_w;
    const Matrix sww = cfg.proxies->beta_w.transpose() * cfg.scm.sigma_a * cfg.proxies->beta_w +
                       cfg.proxies->sigma_eps_w;
    const Matrix omega = omega_w(cfg.scm.sigma_a, saw, sww);
    set = build_set(SetKind::kProxy, cfg.scm.sigma_a, a.lambda, &omega);
  } else {
    throw std::invalid_argument("worst-case: --set must be ols, ar, or par");
  }
  const WorstCase result = worst_case_mspe(cfg.scm, predictor, set);
  if (a.format == "json") {
    nlohmann::json j{{"set", set.label},
                     {"value", result.value},
                     {"degenerate", result.degenerate},
                     {"nu_star", nlohmann::json::array()}};
    for (Eigen::Index i = 0; i < result.nu_star.size(); ++i) j["nu_star"].push_back(result.nu_star(i));
    out << j.dump(2) << "\n";
  } else {
    out << "metric,value\nset," << set.label << "\nworst_case_mspe," << format_double(result.value)
        << "\ndegenerate," << (result.degenerate ? 1 : 0) << "\n";
    for (Eigen::Index i = 0; i < result.nu_star.size(); ++i) {
      out << "nu_star_" << (i + 1) << "," << format_double(result.nu_star(i)) << "\n";
    }
  }
  return 0;
}

struct IdentifyArgs {
  std::string sigma;
  double lambda = kNaN;
  double step = 0.01;
  std::string out_path;
  std::string format = "csv";
};

int do_identify(const IdentifyArgs& a, std::ostream& out) {
  const Sigma3Config cfg = load_sigma3_config(a.sigma);
  const double lambda = std::isnan(a.lambda) ? cfg.lambda : a.lambda;
  const std::vector<RhoScanRow> rows = scan_rho_grid(cfg.sigma, lambda, a.step);
  std::ostringstream body;
  if (a.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const RhoScanRow& r : rows) {
      arr.push_back(nlohmann::json{{"rho_w", r.rho_w},
                                   {"beta_w", r.theta.beta_w},
                                   {"beta_x", r.theta.beta_x},
                                   {"beta_y", r.theta.beta_y},
                                   {"alpha", r.theta.alpha},
                                   {"sigma_w2", r.theta.sigma_w2},
                                   {"sigma_x2", r.theta.sigma_x2},
                                   {"sigma_y2", r.theta.sigma_y2},
                                   {"gamma_par", r.gamma_par},
                                   {"gamma_ar", r.gamma_ar}});
    }
    body << arr.dump(2) << "\n";
  } else {
    body << "rho_w,beta_w,beta_x,beta_y,alpha,sigma_w2,sigma_x2,sigma_y2,gamma_par,gamma_ar\n";
    for (const RhoScanRow& r : rows) {
      body << format_double(r.rho_w) << ',' << format_double(r.theta.beta_w) << ','
           << format_double(r.theta.beta_x) << ',' << format_double(r.theta.beta_y) << ','
           << format_double(r.theta.alpha) << ',' << format_double(r.theta.sigma_w2) << ','
           << format_double(r.theta.sigma_x2) << ',' << format_double(r.theta.sigma_y2) << ','
           << format_double(r.gamma_par) << ',' << format_double(r.gamma_ar) << "\n";
    }
  }
  if (a.out_path.empty()) {
    out << body.str();
  } else {
    const std::string path = resolve_out(a.out_path);
    std::ofstream file(path);
    if (!file) throw std::runtime_error("identify: cannot open '" + path + "' for writing");
    file << body.str();
    if (!file.good()) throw std::runtime_error("identify: write to '" + path + "' failed");
    out << "wrote " << rows.size() << " rows to " << path << "\n";
  }
  return 0;
}

struct ExperimentArgs {
  std::string id;
  std::string config;
  int m = 200;
  std::vector<long> n = {10000};
  double lambda = kNaN;
  std::vector<double> svr;
  double assumed_svr = 0.4;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string noise = "gaussian";
  std::string out_path;
  std::string format = "csv";
};

int do_experiment(const ExperimentArgs& a, std::ostream& out) {
  const ScmConfig scm_cfg = load_scm_config(a.config);
  ExperimentConfig cfg;
  cfg.id = a.id;
  cfg.replicates = a.m;
  cfg.sample_sizes = a.n;
  cfg.lambda = a.lambda;
  cfg.svr_grid = a.svr;
  cfg.assumed_svr = a.assumed_svr;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.noise = noise_kind_from_name(a.noise);
  const ProxyModel* proxies = scm_cfg.proxies.has_value() ? &*scm_cfg.proxies : nullptr;
  const ResultTable table = run_experiment(cfg, scm_cfg.scm, proxies);
  if (a.out_path.empty()) {
    emit_results(table, a.format, out);
  } else {
    const std::string path = resolve_out(a.out_path);
    emit_results(table, a.format, path);
    out << "wrote " << table.rows.size() << " raw rows and " << table.summaries.size()
        << " summary rows to " << path << "\n";
  }
  return 0;
}

struct CvArgs {
  std::string data;
  std::string schema;
  std::string method = "par";
  std::vector<double> grid;
  std::string format = "csv";
};

int do_cv(const CvArgs& a, std::ostream& out) {
  IngestReport report;
  const Dataset data = load_dataset(a.data, a.schema, &report);
  std::vector<double> fold_means;
  const double chosen = loog_cv_lambda(data, a.grid, method_from_name(a.method), &fold_means);
  std::vector<double> grid = a.grid;
  std::sort(grid.begin(), grid.end());
  if (a.format == "json") {
    nlohmann::json j{{"chosen_lambda", chosen},
                     {"lambda_grid", grid},
                     {"mean_validation_mspe", fold_means}};
    out << j.dump(2) << "\n";
  } else {
    out << "lambda,mean_validation_mspe,chosen\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << format_double(grid[i]) << ',' << format_double(fold_means[i]) << ','
          << (grid[i] == chosen ? 1 : 0) << "\n";
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"anchor: simulation, fitting, and robustness analysis for anchor-proxy models"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "draw a sample from a model config");
  simulate_cmd->add_option("--scm", sim.scm, "model config file or builtin name")->required();
  simulate_cmd->add_option("--n", sim.n, "number of rows")->required();
  simulate_cmd->add_option("--seed", sim.seed, "rng seed");
  simulate_cmd->add_option("--out", sim.out_path, "output CSV path")->required();
  simulate_cmd->add_option("--noise", sim.noise, "gaussian, uniform, or rademacher");
  simulate_cmd->add_option("--intervene", sim.intervene, "anchor intervention mean (comma list)")
      ->delimiter(',');
  simulate_cmd->add_option("--intervene-cov", sim.intervene_cov,
                           "anchor intervention covariance, rows separated by ';'");
  simulate_cmd->add_flag("--no-anchors", sim.no_anchors, "omit anchor columns from the output");
  simulate_cmd->add_flag("--keep-hidden", sim.keep_hidden, "include hidden columns");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a predictor to a CSV sample");
  fit_cmd->add_option("--method", fit.method, "ols, ar, par, xpar, tar, ptar, or xtar")
      ->required();
  fit_cmd->add_option("--lambda", fit.lambda, "penalty weight (ar/par/xpar)");
  fit_cmd->add_option("--data", fit.data, "training CSV")->required();
  fit_cmd->add_option("--schema", fit.schema, "ingestion schema (raw CSVs)");
  fit_cmd->add_flag("--centered", fit.centered, "center moments and fit an intercept");
  fit_cmd->add_option("--target-mean", fit.target_mean, "anticipated mean (tar/ptar/xtar)")
      ->delimiter(',');
  fit_cmd->add_option("--target-cov", fit.target_cov,
                      "anticipated covariance, rows separated by ';'");
  fit_cmd->add_option("--out", fit.out_path, "write the predictor JSON here instead of stdout");

  EvaluateArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "mean squared prediction error on a CSV");
  eval_cmd->add_option("--predictor", eval.predictor, "predictor JSON")->required();
  eval_cmd->add_option("--data", eval.data, "evaluation CSV")->required();
  eval_cmd->add_option("--schema", eval.schema, "ingestion schema (raw CSVs)");
  eval_cmd->add_option("--format", eval.format, "csv or json");

  WorstCaseArgs wc;
  CLI::App* wc_cmd = app.add_subcommand("worst-case", "worst-case MSPE over an intervention set");
  wc_cmd->add_option("--scm", wc.scm, "model config file or builtin name")->required();
  wc_cmd->add_option("--predictor", wc.predictor, "predictor JSON")->required();
  wc_cmd->add_option("--set", wc.set, "ols, ar, or par");
  wc_cmd->add_option("--lambda", wc.lambda, "set strength");
  wc_cmd->add_option("--format", wc.format, "csv or json");

  IdentifyArgs ident;
  CLI::App* ident_cmd =
      app.add_subcommand("identify", "scan the observationally equivalent one-proxy family");
  ident_cmd->add_option("--sigma", ident.sigma, "3x3 covariance config file or builtin name")
      ->required();
  ident_cmd->add_option("--lambda", ident.lambda, "penalty weight (default: from the config)");
  ident_cmd->add_option("--step", ident.step, "grid step over (0, 1]");
  ident_cmd->add_option("--out", ident.out_path, "output path (default stdout)");
  ident_cmd->add_option("--format", ident.format, "csv or json");

  ExperimentArgs exp;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "run a named Monte Carlo study");
  exp_cmd
      ->add_option("id", exp.id,
                   "robustness, misspecified-svr, causal-anticausal, or targeted")
      ->required();
  exp_cmd->add_option("--config", exp.config, "model config file or builtin name")->required();
  exp_cmd->add_option("--m", exp.m, "replicates");
  exp_cmd->add_option("--n", exp.n, "sample sizes (comma list)")->delimiter(',');
  exp_cmd->add_option("--lambda", exp.lambda, "penalty weight (default per experiment)");
  exp_cmd->add_option("--svr", exp.svr, "signal-to-variance grid (comma list)")->delimiter(',');
  exp_cmd->add_option("--assumed-svr", exp.assumed_svr, "assumed ratio (misspecified-svr)");
  exp_cmd->add_option("--seed", exp.seed, "base seed");
  exp_cmd->add_option("--jobs", exp.jobs, "parallel replicate workers");
  exp_cmd->add_option("--noise", exp.noise, "gaussian, uniform, or rademacher");
  exp_cmd->add_option("--out", exp.out_path, "output path (default stdout)");
  exp_cmd->add_option("--format", exp.format, "csv or json");

  CvArgs cv;
  CLI::App* cv_cmd =
      app.add_subcommand("cv", "leave-one-group-out cross-validation over lambda");
  cv_cmd->add_option("--data", cv.data, "CSV with a group column")->required();
  cv_cmd->add_option("--schema", cv.schema, "ingestion schema (raw CSVs)");
  cv_cmd->add_option("--method", cv.method, "ar, par, or xpar");
  cv_cmd->add_option("--grid", cv.grid, "lambda grid (comma list)")->required()->delimiter(',');
  cv_cmd->add_option("--format", cv.format, "csv or json");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("anchor");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate_cmd->parsed()) return do_simulate(sim, out);
    if (fit_cmd->parsed()) return do_fit(fit, out);
    if (eval_cmd->parsed()) return do_evaluate(eval, out);
    if (wc_cmd->parsed()) return do_worst_case(wc, out);
    if (ident_cmd->parsed()) return do_identify(ident, out);
    if (exp_cmd->parsed()) return do_experiment(exp, out);
    if (cv_cmd->parsed()) return do_cv(cv, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no command given\n";
  return 2;
}

}  // namespace anchor
