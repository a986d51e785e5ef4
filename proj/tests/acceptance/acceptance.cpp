// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: addsel_acceptance <golden-dir> [criterion numbers...]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "addsel/basis.hpp"
#include "addsel/criterion.hpp"
#include "addsel/fitting.hpp"
#include "addsel/group_lasso.hpp"
#include "addsel/io.hpp"
#include "addsel/sim_config.hpp"
#include "addsel/simulation.hpp"
#include "addsel_cli/commands.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace addsel;
using addsel::testing::normal_equations;
using addsel::testing::random_normal_vector;
using addsel::testing::random_unit_matrix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Outcome partition_of_unity() {
  double worst = 0.0;
  for (int q = 2; q <= 4; ++q) {
    for (int K = q - 1; K <= 20; ++K) {
      const auto spec = make_spec(q, K);
      for (int g = 0; g <= 1000; ++g) {
        worst = std::max(worst, std::abs(eval_raw_basis(spec, g / 1000.0).sum() - 1.0));
      }
    }
  }
  return {worst < 1e-10, "max |sum B_k - 1| = " + num(worst)};
}

Outcome design_centering() {
  Philox rng(stream_key(2, 0));
  bool ok = true;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto n = 10 + static_cast<Eigen::Index>(rng() % 491);
    const auto p = 1 + static_cast<Eigen::Index>(rng() % 20);
    const int q = 2 + static_cast<int>(rng() % 3);
    const int K = q - 1 + static_cast<int>(rng() % 8);
    const auto design = build_design(random_unit_matrix(n, p, rng), make_spec(q, K));
    const auto sums = design.values().rightCols(p * K).colwise().sum();
    const double ratio = sums.cwiseAbs().maxCoeff() / static_cast<double>(n);
    worst = std::max(worst, ratio);
    ok = ok && ratio <= 1e-9;
    ok = ok && (design.intercept().array() == 1.0 / std::sqrt(static_cast<double>(K))).all();
  }
  return {ok, "max |column sum| / n = " + num(worst) + ", intercept exact"};
}

Outcome least_squares_oracle() {
  Philox rng(stream_key(3, 0));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto design = build_design(random_unit_matrix(50, 3, rng), make_spec(4, 5));
    const Vector y = random_normal_vector(50, rng);
    const Submodel S{0, 1, 2};
    const auto fit = fit_submodel(design, y, S);
    const Vector oracle = normal_equations(submatrix(design, S), y);
    worst = std::max(worst, (fit.coefficients - oracle).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, "max |coef - oracle| = " + num(worst)};
}

Outcome approximation_power() {
  constexpr int kSamples = 2000;
  Matrix X(kSamples, 1);
  Vector y(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    X(i, 0) = static_cast<double>(i) / (kSamples - 1);
    y[i] = std::sin(2.0 * M_PI * X(i, 0));
  }
  const auto design = build_design(X, make_spec(4, 20));
  const auto fit = fit_submodel(design, y, Submodel{0});
  const auto est = component_from_fit(design, fit, 0);
  const double mu = recover_intercept(fit, design.dim());
  double worst = 0.0;
  for (int g = 0; g <= 1000; ++g) {
    const double x = g / 1000.0;
    worst = std::max(worst, std::abs(mu + eval_component(est, x) - std::sin(2.0 * M_PI * x)));
  }
  return {worst < 1e-3, "sup error = " + num(worst)};
}

Outcome group_lasso_correctness() {
  Philox rng(stream_key(5, 0));
  std::ostringstream detail;
  bool ok = true;

  // lambda = 0 against least squares.
  const Matrix X0 = random_unit_matrix(120, 4, rng);
  const auto design0 = build_design(X0, make_spec(4, 5));
  const Vector y0 = testing::two_component_response(X0, 0.5, rng);
  SolverOptions exact;
  exact.tol = 1e-12;
  exact.max_sweeps = 100000;
  const auto unit = Weights::unit(4);
  const auto gl0 = fit_group_lasso(design0, y0, 0.0, unit, exact);
  const auto ls0 = fit_submodel(design0, y0, Submodel::full(4));
  const double diff0 = (gl0.coefficients - ls0.coefficients).cwiseAbs().maxCoeff();
  ok = ok && diff0 <= 1e-6;
  detail << "lambda=0 diff " << num(diff0);

  const double lmax = lambda_max(design0, y0, unit);
  const auto glmax = fit_group_lasso(design0, y0, lmax, unit);
  const bool zero = glmax.coefficients.tail(glmax.coefficients.size() - 1).isZero(0.0);
  const double kmax = kkt_residual(design0, y0, lmax, unit, glmax.coefficients);
  ok = ok && zero && kmax < 1e-10;
  detail << "; lambda_max zero=" << zero << " kkt " << num(kmax);

  double worst_kkt = 0.0;
  double worst_rise = 0.0;
  bool all_converged = true;
  SolverOptions opts;
  opts.tol = 1e-8;
  opts.max_sweeps = 100000;
  opts.trace_objective = true;
  for (int t = 0; t < 50; ++t) {
    const auto n = 60 + static_cast<Eigen::Index>(rng() % 141);
    const auto p = 2 + static_cast<Eigen::Index>(rng() % 9);
    const Matrix X = random_unit_matrix(n, p, rng);
    const auto design = build_design(X, make_spec(4, 4 + static_cast<int>(rng() % 3)));
    const Vector y = testing::two_component_response(X, 1.0, rng);
    Weights w = Weights::unit(static_cast<int>(p));
    for (auto& v : w.values) v = 0.5 + rng.uniform();
    const double lambda = lambda_max(design, y, w) * (0.02 + 0.9 * rng.uniform());
    const auto fit = fit_group_lasso(design, y, lambda, w, opts);
    all_converged = all_converged && fit.converged;
    worst_kkt = std::max(worst_kkt, kkt_residual(design, y, lambda, w, fit.coefficients));
    const auto& trace = fit.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      worst_rise = std::max(worst_rise, (trace[i] - trace[i - 1]) / std::max(1.0, std::abs(trace[i - 1])));
    }
  }
  // Relative rise up to a few ulps is rounding in the objective sum itself.
  const bool monotone = worst_rise <= 1e-13;
  ok = ok && all_converged && worst_kkt < 1e-6 && monotone;
  detail << "; 50 instances kkt " << num(worst_kkt) << " converged=" << all_converged
         << " max relative rise " << num(worst_rise);
  return {ok, detail.str()};
}

Outcome criterion_arithmetic() {
  const double pen = penalty_value(PenaltySpec::semiparametric(), 2, 5, 100, 10);
  const auto rec = make_record(Submodel{0, 1}, 100.0, pen, 2);
  const double err = std::abs(rec.criterion - 5.2959457);
  bool ok = err <= 1e-6;

  Philox rng(stream_key(6, 0));
  double slack = std::numeric_limits<double>::infinity();
  std::size_t entries = 0;
  for (int t = 0; t < 20; ++t) {
    const Matrix X = random_unit_matrix(100, 6, rng);
    const auto design = build_design(X, make_spec(4, 5));
    const Vector y = testing::two_component_response(X, 1.0, rng);
    PathOptions popts;
    popts.count = 30;
    const auto path = solve_path(design, y, Weights::unit(6), popts);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto lam = bic_lambda(design, y, path.coefficients[i], path.lambdas[i], PenaltySpec::semiparametric());
      const auto sub = bic_submodel(design, y, path.active_sets[i], PenaltySpec::semiparametric());
      slack = std::min(slack, lam.criterion - sub.criterion);
      ++entries;
    }
  }
  ok = ok && slack >= 0.0;
  return {ok, "hand case " + num(rec.criterion) + "; min bic_lambda - bic_submodel over " +
                  std::to_string(entries) + " entries = " + num(slack)};
}

SimConfig base_config(int n, int p, int s, double sd, int reps) {
  SimConfig c;
  c.n = n;
  c.p = p;
  c.s = s;
  c.noise_sd = sd;
  c.replications = reps;
  c.seed = 1;
  return c;
}

Outcome penalized_vs_exhaustive() {
  auto c = base_config(200, 10, 2, 0.1, 20);
  c.selection.max_size = 4;
  c.methods = {MethodSpec{Method::Exhaustive, PenaltySpec::semiparametric()},
               MethodSpec{Method::Penalized, PenaltySpec::semiparametric()}};
  const auto report = run_experiment(c);
  int agree = 0;
  for (int r = 0; r < 20; ++r) agree += report.selections[0][r] == report.selections[1][r];
  return {agree >= 18, std::to_string(agree) + "/20 agree"};
}

Outcome consistency_trend() {
  std::vector<double> rate;
  for (int n : {100, 200, 400}) {
    auto c = base_config(n, 50, 3, 1.0, 100);
    c.methods = {MethodSpec{Method::Penalized, PenaltySpec::semiparametric()}};
    rate.push_back(run_experiment(c).rows[0].exact_rate);
  }
  const bool ok = rate[2] >= rate[1] - 0.05 && rate[1] - 0.05 >= rate[0] - 0.10 && rate[2] >= 0.8;
  return {ok, "exact_rate n=100/200/400: " + num(rate[0]) + " / " + num(rate[1]) + " / " + num(rate[2])};
}

Outcome liberality() {
  auto c = base_config(100, 200, 3, 1.0, 100);
  c.methods = {MethodSpec{Method::Greedy, PenaltySpec::classic()},
               MethodSpec{Method::Greedy, PenaltySpec::semiparametric()}};
  const auto report = run_experiment(c);
  const double classic = report.rows[0].overfit_rate;
  const double semi = report.rows[1].overfit_rate;
  return {classic >= semi, "overfit classic " + num(classic) + " vs semiparametric " + num(semi)};
}

std::pair<std::string, std::string> render(const SimConfig& c) {
  const auto report = run_experiment(c);
  return {report_csv(report), report_json(report).dump(2)};
}

Outcome determinism() {
  auto c = base_config(120, 8, 3, 1.0, 12);
  c.selection.max_size = 4;
  c.covariates = CovariateKind::GaussianCopula;
  c.rho = 0.3;
  c.methods = {MethodSpec{Method::Exhaustive, PenaltySpec::semiparametric()},
               MethodSpec{Method::Greedy, PenaltySpec::classic()},
               MethodSpec{Method::Penalized, PenaltySpec::semiparametric()}};
  c.threads = 1;
  const auto first = render(c);
  const auto second = render(c);
  c.threads = 4;
  const auto parallel = render(c);
  c.selection.search.threads = 3;
  const auto nested = render(c);
  const bool ok = first == second && first == parallel && first == nested;
  return {ok, "serial rerun, 4-thread and nested-thread reports byte-identical: " + std::string(ok ? "yes" : "no")};
}

Outcome cli_goldens(const fs::path& golden) {
  const fs::path work = fs::temp_directory_path() / ("addsel_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  struct Case {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::string data = (golden / "data.csv").string();
  const std::vector<Case> cases = {
      {"fit", {"fit", "--input", data}, {"selected.json", "components.csv"}},
      {"path", {"path", "--input", data, "--max-size", "3"}, {"path.csv"}},
      {"simulate", {"simulate", "--config", (golden / "simulate.cfg").string()}, {"report.csv", "report.json"}},
      {"basis", {"basis", "--order", "4", "--spline-k", "6"}, {"basis.csv"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    auto args = c.args;
    args.push_back("--out-dir");
    args.push_back((work / c.name).string());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    bool same = code == 0;
    for (const auto& f : c.files) {
      same = same && fs::exists(work / c.name / f) &&
             io::read_text(work / c.name / f) == io::read_text(golden / "expected" / c.name / f);
    }
    ok = ok && same;
    detail += c.name + (same ? " ok " : " MISMATCH ");
  }
  fs::remove_all(work);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: addsel_acceptance <golden-dir> [criteria...]\n";
    return 2;
  }
  const fs::path golden = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::stoi(argv[i]));

  struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "partition of unity", 1, partition_of_unity},
      {2, "design centering", 5, design_centering},
      {3, "least-squares oracle", 10, least_squares_oracle},
      {4, "approximation power", 1, approximation_power},
      {5, "group lasso correctness", 30, group_lasso_correctness},
      {6, "criterion arithmetic", 10, criterion_arithmetic},
      {7, "penalized vs exhaustive agreement", 120, penalized_vs_exhaustive},
      {8, "selection consistency trend", 900, consistency_trend},
      {9, "liberality ordering", 600, liberality},
      {10, "determinism", 120, determinism},
      {11, "CLI golden files", 60, [&] { return cli_goldens(golden); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << num(secs) << " s" << (in_time ? "" : ", over budget") << ")\n";
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " failing\n";
  return failed ? 1 : 0;
}
