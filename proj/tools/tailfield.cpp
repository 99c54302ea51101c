// Command-line front end: simulation, estimation, the stationarity test,
// Monte Carlo sweeps, and closed-form table dumps.
//
// Exit codes: 0 success, 1 usage/validation, 2 degenerate data, 3 IO.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailfield/io.hpp"
#include "tailfield/models.hpp"
#include "tailfield/normal.hpp"
#include "tailfield/reference.hpp"
#include "tailfield/stattest.hpp"

using nlohmann::json;
using namespace tailfield;

namespace {

ModelSpec parse_model(const std::string& name) {
  if (name == "smith") return ModelSpec::smith();
  if (name == "pareto") return ModelSpec::pareto();
  throw validation_error("unknown model '" + name + "' (expected smith or pareto)");
}

json diagnostics_json(const TestDiagnostics& d) {
  return json{{"tie_count", d.tie_count},
              {"ridge_applied", d.ridge_applied},
              {"toeplitz_deviation", d.toeplitz_deviation},
              {"mvn_budget_exceeded", d.mvn_budget_exceeded},
              {"mvn_ridged", d.mvn_ridged},
              {"mvn_points", d.mvn_points}};
}

json cov_json(const CovMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim; ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim; ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

struct CommonOptions {
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string format = "csv";
};

struct SimulateOptions {
  std::string model = "pareto";
  int n = 500;
  int grid_n = 20;
  double theta = 0.0;
  double window_halfwidth = 5.0;
  std::string out;
};

struct EstimateOptions {
  std::string input;
  double k = 50.0;
  int delta = 2;
  double eta = 0.0;
  std::vector<int> indices;
  std::vector<double> x;
  std::string out;
};

struct TestOptions {
  std::string input;
  double k = 50.0;
  int delta = 2;
  double eta = 0.0;
  double mvn_tol = 1e-4;
  long mvn_budget = 200000;
  bool relabel_uniform = false;
  std::string out;
};

struct McOptions {
  std::string model = "smith";
  std::vector<double> thetas{0.0, 0.5, 1.0};
  int n = 500;
  int grid_n = 20;
  double k = 50.0;
  int delta = 2;
  double eta = 0.0;
  double mvn_tol = 1e-4;
  int reps = 100;
  double window_halfwidth = 5.0;
  std::string out;
};

struct TheoryOptions {
  std::string model = "smith";
  int grid_n = 20;
  int delta = 2;
  double mvn_tol = 1e-5;
  std::string out;
};

int cmd_simulate(const CommonOptions& common, const SimulateOptions& opt) {
  const ModelSpec model = parse_model(opt.model);
  const Grid grid = distort_grid(Grid::uniform(opt.grid_n), opt.theta);
  FunctionalSample sample = model.kind == ModelKind::Smith
                                ? simulate_smith(opt.n, grid, opt.window_halfwidth, common.seed)
                                : simulate_pareto(opt.n, grid, common.seed);
  write_sample_csv(opt.out, sample);
  write_sample_metadata(metadata_path_for(opt.out), sample);
  std::cout << "wrote " << sample.n() << "x" << grid.points() << " sample to " << opt.out << "\n";
  return 0;
}

int cmd_estimate(const CommonOptions& common, const EstimateOptions& opt) {
  FunctionalSample sample = read_sample_csv(opt.input);
  const RankMatrix ranks = compute_ranks(sample);
  if (!(opt.k > 0.0 && opt.k <= ranks.n))
    throw validation_error("estimate: k must lie in (0, n]");
  const Matrix pairwise = pairwise_tdc_matrix(ranks, opt.k);
  const double eta = opt.eta > 0.0 ? opt.eta : default_derivative_bandwidth(opt.k);

  // lag-averaged partial derivative estimates for lags 1..delta
  std::vector<double> partials;
  const int N = ranks.m - 1;
  for (int ell = 1; ell <= opt.delta; ++ell) {
    double sum = 0.0;
    int cnt = 0;
    for (int r = 0; r + ell <= N; ++r) {
      sum += estimate_partial_derivative(ranks, opt.k, r, r + ell, 1, eta);
      ++cnt;
    }
    partials.push_back(cnt ? sum / cnt : 0.0);
  }

  double query_R = std::numeric_limits<double>::quiet_NaN();
  double query_stdf = std::numeric_limits<double>::quiet_NaN();
  if (!opt.indices.empty()) {
    TailCopulaQuery q{opt.indices,
                      opt.x.empty() ? std::vector<double>(opt.indices.size(), 1.0) : opt.x,
                      opt.k};
    query_R = empirical_tail_copula(ranks, q);
    query_stdf = empirical_stdf(ranks, q);
  }

  if (common.format == "json") {
    json out;
    out["k"] = opt.k;
    out["eta"] = eta;
    out["tie_count"] = ranks.tie_count;
    json rows = json::array();
    for (std::size_t i = 0; i < pairwise.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < pairwise.cols(); ++j) row.push_back(pairwise(i, j));
      rows.push_back(row);
    }
    out["pairwise_tdc"] = rows;
    out["lag_partials"] = partials;
    if (!opt.indices.empty()) {
      out["query"] = {{"indices", opt.indices},
                      {"x", opt.x},
                      {"tail_copula", query_R},
                      {"stdf", query_stdf}};
    }
    std::ofstream f(opt.out);
    if (!f) throw io_error("cannot open file for writing: " + opt.out);
    f << out.dump(2) << '\n';
  } else {
    write_matrix_csv(opt.out + "_pairwise.csv", pairwise);
    std::ofstream f(opt.out + "_partials.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_partials.csv");
    f << "lag,partial\n";
    for (int ell = 1; ell <= opt.delta; ++ell)
      f << ell << ',' << format_double(partials[ell - 1]) << '\n';
    if (!opt.indices.empty()) {
      std::ofstream q(opt.out + "_query.csv");
      q << "tail_copula,stdf\n" << format_double(query_R) << ',' << format_double(query_stdf) << '\n';
    }
  }
  std::cout << "estimates written with prefix " << opt.out << "\n";
  return 0;
}

int cmd_test(const CommonOptions& common, const TestOptions& opt) {
  (void)common;
  FunctionalSample sample = read_sample_csv(opt.input);
  if (opt.relabel_uniform) sample.grid = Grid::uniform(sample.grid.intervals());
  TestConfig config;
  config.k = opt.k;
  config.Delta = opt.delta;
  config.eta = opt.eta;
  config.mvn.tol = opt.mvn_tol;
  config.mvn.max_points = opt.mvn_budget;
  const TestResult result = stationarity_test(sample, config);

  json report;
  report["config"] = {{"input", opt.input},
                      {"n", sample.n()},
                      {"grid_intervals", sample.grid.intervals()},
                      {"k", opt.k},
                      {"delta", opt.delta},
                      {"eta", config.effective_eta()},
                      {"mvn_tol", opt.mvn_tol},
                      {"mvn_budget", opt.mvn_budget},
                      {"relabel_uniform", opt.relabel_uniform}};
  report["D"] = result.D;
  report["count_range"] = result.count_range;
  report["I_hat"] = result.I_hat;
  report["Sigma_hat"] = cov_json(result.Sigma_hat);
  report["p_value"] = result.p_value;
  report["diagnostics"] = diagnostics_json(result.diagnostics);
  if (!opt.out.empty()) {
    std::ofstream f(opt.out);
    if (!f) throw io_error("cannot open file for writing: " + opt.out);
    f << report.dump(2) << '\n';
  }
  std::cout << "D = " << format_double(result.D) << "  p = " << format_double(result.p_value)
            << "  (ties " << result.diagnostics.tie_count << ", ridge "
            << (result.diagnostics.ridge_applied ? "yes" : "no") << ")\n";
  return 0;
}

int cmd_mc(const CommonOptions& common, const McOptions& opt) {
  McConfig config;
  config.model = parse_model(opt.model);
  config.thetas = opt.thetas;
  config.n = opt.n;
  config.grid_intervals = opt.grid_n;
  config.reps = opt.reps;
  config.seed = common.seed;
  config.test.k = opt.k;
  config.test.Delta = opt.delta;
  config.test.eta = opt.eta;
  config.test.mvn.tol = opt.mvn_tol;
  config.window_halfwidth = opt.window_halfwidth;

  const McExperiment experiment = monte_carlo_experiment(config);

  {
    std::ofstream f(opt.out + "_summary.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_summary.csv");
    f << "theta,alpha,reject_rate,se\n";
    for (const auto& row : experiment.summary)
      f << format_double(row.theta) << ',' << format_double(row.alpha) << ','
        << format_double(row.reject_rate) << ',' << format_double(row.se) << '\n';
  }

  // PP-plot data for the null p-values
  {
    std::ofstream f(opt.out + "_pp.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_pp.csv");
    f << "theta,uniform_quantile,p_value\n";
    for (const auto& tr : experiment.per_theta) {
      std::vector<double> sorted = tr.p_values;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i)
        f << format_double(tr.theta) << ',' << format_double((i + 0.5) / sorted.size()) << ','
          << format_double(sorted[i]) << '\n';
    }
  }

  // Null pmf of the integer statistic together with the limit density
  const auto null_it =
      std::find_if(experiment.per_theta.begin(), experiment.per_theta.end(),
                   [](const McThetaResult& tr) { return tr.theta == 0.0; });
  if (null_it != experiment.per_theta.end()) {
    const double scale = 2.0 * opt.delta * std::sqrt(opt.k);
    long max_stat = 0;
    for (long s : null_it->scaled_stats) max_stat = std::max(max_stat, s);
    std::vector<long> counts(max_stat + 1, 0);
    for (long s : null_it->scaled_stats) ++counts[s];

    const CovMatrix sigma =
        theoretical_VN_covariance(config.model, opt.grid_n, opt.delta, config.test.mvn);
    const double step = default_range_pdf_step(config.test.mvn.tol);
    std::ofstream f(opt.out + "_null_pmf.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_null_pmf.csv");
    f << "m,count,pmf,limit_pdf\n";
    for (long mval = 0; mval <= max_stat; ++mval) {
      const double q = mval / scale;
      double pdf;
      if (q > step) {
        pdf = range_pdf(q, sigma, step, config.test.mvn) / scale;
      } else {
        pdf = range_cdf(q + step, sigma, config.test.mvn) / (q + step) / scale;
      }
      f << mval << ',' << counts[mval] << ','
        << format_double(static_cast<double>(counts[mval]) / opt.reps) << ','
        << format_double(pdf) << '\n';
    }
  }

  {
    json full;
    full["config"] = {{"model", opt.model}, {"thetas", opt.thetas},  {"n", opt.n},
                      {"grid_n", opt.grid_n}, {"k", opt.k},          {"delta", opt.delta},
                      {"reps", opt.reps},     {"seed", common.seed}, {"eta", config.test.effective_eta()}};
    json per_theta = json::array();
    for (const auto& tr : experiment.per_theta) {
      per_theta.push_back({{"theta", tr.theta},
                           {"p_values", tr.p_values},
                           {"d_values", tr.d_values},
                           {"scaled_stats", tr.scaled_stats}});
    }
    full["per_theta"] = per_theta;
    json summary = json::array();
    for (const auto& row : experiment.summary)
      summary.push_back({{"theta", row.theta},
                         {"alpha", row.alpha},
                         {"reject_rate", row.reject_rate},
                         {"se", row.se}});
    full["summary"] = summary;
    std::ofstream f(opt.out + "_full.json");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_full.json");
    f << full.dump(2) << '\n';
  }

  for (const auto& row : experiment.summary)
    if (row.alpha == 0.05)
      std::cout << "theta " << row.theta << ": reject rate " << row.reject_rate << " (se "
                << row.se << ") at alpha 0.05\n";
  return 0;
}

int cmd_theory(const CommonOptions& common, const TheoryOptions& opt) {
  (void)common;
  const ModelSpec model = parse_model(opt.model);
  MvnOptions mvn;
  mvn.tol = opt.mvn_tol;
  const int N = opt.grid_n;

  {
    std::ofstream f(opt.out + "_R.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_R.csv");
    f << "lag,R11\n";
    for (int ell = 0; ell <= N; ++ell)
      f << ell << ','
        << format_double(bivariate_R(model, 0.0, static_cast<double>(ell) / N, 1.0, 1.0)) << '\n';
  }
  {
    std::ofstream f(opt.out + "_partials.csv");
    if (!f) throw io_error("cannot open file for writing: " + opt.out + "_partials.csv");
    f << "lag,partial\n";
    for (int ell = 1; ell <= N; ++ell)
      f << ell << ','
        << format_double(
               husler_reiss_partial(model, 0.0, static_cast<double>(ell) / N, 1, 1.0, 1.0))
        << '\n';
  }
  {
    const CovMatrix sigma = theoretical_VN_covariance(model, N, opt.delta, mvn);
    Matrix m(sigma.dim, sigma.dim);
    for (int i = 0; i < sigma.dim; ++i)
      for (int j = 0; j < sigma.dim; ++j) m(i, j) = sigma.at(i, j);
    write_matrix_csv(opt.out + "_sigma.csv", m);
  }
  std::cout << "theory tables written with prefix " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric tail-dependence analysis for functional data on a grid"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--seed", common.seed, "RNG seed")->envname("TAILFIELD_SEED");
  app.add_option("--jobs", common.jobs, "worker thread count (0 = library default)")
      ->envname("TAILFIELD_JOBS");
  app.add_option("--format", common.format, "output format for estimate (csv|json)")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("TAILFIELD_FORMAT");

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "draw a sample from a model");
  sim->add_option("--model", sim_opt.model, "smith | pareto")
      ->check(CLI::IsMember({"smith", "pareto"}))
      ->envname("TAILFIELD_MODEL");
  sim->add_option("--n", sim_opt.n, "number of trajectories");
  sim->add_option("--grid-n", sim_opt.grid_n, "number of grid intervals N");
  sim->add_option("--theta", sim_opt.theta, "grid distortion parameter in [0,1]");
  sim->add_option("--window-halfwidth", sim_opt.window_halfwidth, "Smith window halfwidth A");
  sim->add_option("--out", sim_opt.out, "output CSV path")->required();

  EstimateOptions est_opt;
  auto* est = app.add_subcommand("estimate", "rank-based tail dependence estimates");
  est->add_option("--input", est_opt.input, "sample CSV")->required();
  est->add_option("--k", est_opt.k, "threshold parameter");
  est->add_option("--delta", est_opt.delta, "max lag for partial derivative table");
  est->add_option("--eta", est_opt.eta, "finite-difference bandwidth (0 = k^-1/4)");
  est->add_option("--indices", est_opt.indices, "grid indices of a d-variate query");
  est->add_option("--x", est_opt.x, "arguments of the query (default all 1)");
  est->add_option("--out", est_opt.out, "output path / prefix")->required();

  TestOptions test_opt;
  auto* tst = app.add_subcommand("test", "tail copula stationarity test");
  tst->add_option("--input", test_opt.input, "sample CSV")->required();
  tst->add_option("--k", test_opt.k, "threshold parameter");
  tst->add_option("--delta", test_opt.delta, "window halfwidth Delta");
  tst->add_option("--eta", test_opt.eta, "finite-difference bandwidth (0 = k^-1/4)");
  tst->add_option("--mvn-tol", test_opt.mvn_tol, "MVN integration tolerance");
  tst->add_option("--mvn-budget", test_opt.mvn_budget, "MVN point budget per call");
  tst->add_flag("--relabel-uniform", test_opt.relabel_uniform,
                "treat locations as the uniform grid r/N");
  tst->add_option("--out", test_opt.out, "JSON report path");

  McOptions mc_opt;
  auto* mc = app.add_subcommand("mc", "Monte Carlo size/power experiment");
  mc->add_option("--model", mc_opt.model, "smith | pareto")
      ->check(CLI::IsMember({"smith", "pareto"}));
  mc->add_option("--thetas", mc_opt.thetas, "distortion parameters");
  mc->add_option("--n", mc_opt.n, "sample size per replication");
  mc->add_option("--grid-n", mc_opt.grid_n, "number of grid intervals N");
  mc->add_option("--k", mc_opt.k, "threshold parameter");
  mc->add_option("--delta", mc_opt.delta, "window halfwidth Delta");
  mc->add_option("--eta", mc_opt.eta, "finite-difference bandwidth (0 = k^-1/4)");
  mc->add_option("--mvn-tol", mc_opt.mvn_tol, "MVN integration tolerance");
  mc->add_option("--reps", mc_opt.reps, "replications per theta");
  mc->add_option("--window-halfwidth", mc_opt.window_halfwidth, "Smith window halfwidth A");
  mc->add_option("--out", mc_opt.out, "output prefix")->required();

  TheoryOptions theory_opt;
  auto* thy = app.add_subcommand("theory", "closed-form R, partials, and Sigma tables");
  thy->add_option("--model", theory_opt.model, "smith | pareto")
      ->check(CLI::IsMember({"smith", "pareto"}));
  thy->add_option("--grid-n", theory_opt.grid_n, "number of grid intervals N");
  thy->add_option("--delta", theory_opt.delta, "window halfwidth Delta");
  thy->add_option("--mvn-tol", theory_opt.mvn_tol, "MVN integration tolerance");
  thy->add_option("--out", theory_opt.out, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_threads(common.jobs);
    if (sim->parsed()) return cmd_simulate(common, sim_opt);
    if (est->parsed()) return cmd_estimate(common, est_opt);
    if (tst->parsed()) return cmd_test(common, test_opt);
    if (mc->parsed()) return cmd_mc(common, mc_opt);
    if (thy->parsed()) return cmd_theory(common, theory_opt);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const degenerate_data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
