#include <cmath>

#include "addsel/error.hpp"
#include "addsel/fitting.hpp"
#include "addsel/group_lasso.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace addsel;

namespace {

struct Instance {
  DesignMatrix design;
  Vector y;
};

Instance random_instance(Philox& rng, int n = 120, int p = 5, int dim = 5, double sd = 0.5) {
  const Matrix X = testing::random_unit_matrix(n, p, rng);
  Vector y = testing::two_component_response(X, sd, rng);
  return {build_design(X, make_spec(4, dim)), std::move(y)};
}

}  // namespace

TEST_CASE("lambda_max edge cases and hand value") {
  Philox rng(30);
  auto inst = random_instance(rng);
  const auto unit = Weights::unit(inst.design.p());
  CHECK(lambda_max(inst.design, Vector::Constant(120, 3.0), unit) == doctest::Approx(0.0));
  const double base = lambda_max(inst.design, inst.y, unit);
  const Vector doubled = 2.0 * (inst.y.array() - inst.y.mean()).matrix();
  CHECK(lambda_max(inst.design, doubled, unit) == doctest::Approx(2.0 * base).epsilon(1e-12));

  // Z_1 = (0.4, 0.1, -0.5), r0 = y - 7/3 -> Z_1^T r0 = -1.4.
  Matrix X(3, 1);
  X << 0.1, 0.4, 1.0;
  const auto tiny = build_design(X, make_spec(2, 1));
  Vector y(3);
  y << 1, 2, 4;
  CHECK(lambda_max(tiny, y, Weights::unit(1)) == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(lambda_max(tiny, y, Weights{{4.0}}) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(lambda_max(tiny, y, Weights{{kInfiniteWeight}}), InvalidParameters);
}

TEST_CASE("lambda = 0 reproduces least squares") {
  Philox rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng, 100, 3, 5);
    SolverOptions opts;
    opts.tol = 1e-10;
    opts.max_sweeps = 20000;
    const auto fit = fit_group_lasso(inst.design, inst.y, 0.0, Weights::unit(3), opts);
    const auto ls = fit_submodel(inst.design, inst.y, Submodel::full(3));
    CHECK((fit.coefficients - ls.coefficients).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("at lambda_max every group is zero and KKT holds exactly") {
  Philox rng(32);
  auto inst = random_instance(rng);
  const auto unit = Weights::unit(inst.design.p());
  const double top = lambda_max(inst.design, inst.y, unit);
  for (double lambda : {top, 1.5 * top}) {
    const auto fit = fit_group_lasso(inst.design, inst.y, lambda, unit);
    CHECK(fit.converged);
    CHECK(active_set(inst.design, fit.coefficients).empty());
    CHECK(fit.coefficients[0] == doctest::Approx(std::sqrt(5.0) * inst.y.mean()).epsilon(1e-12));
    CHECK(kkt_residual(inst.design, inst.y, lambda, unit, fit.coefficients) < 1e-10);
  }
}

TEST_CASE("converged fits satisfy KKT and perturbations break it") {
  Philox rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng);
    const auto unit = Weights::unit(inst.design.p());
    const double lambda = 0.1 * lambda_max(inst.design, inst.y, unit);
    SolverOptions opts;
    opts.tol = 1e-8;
    const auto fit = fit_group_lasso(inst.design, inst.y, lambda, unit, opts);
    REQUIRE(fit.converged);
    CHECK(kkt_residual(inst.design, inst.y, lambda, unit, fit.coefficients) <= 10 * opts.tol);
    Vector bent = fit.coefficients;
    bent[inst.design.block_start(0)] += 0.1;
    CHECK(kkt_residual(inst.design, inst.y, lambda, unit, bent) > 10 * opts.tol);
  }
}

TEST_CASE("objective never increases across sweeps") {
  Philox rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 80, 6, 6);
    const auto unit = Weights::unit(inst.design.p());
    SolverOptions opts;
    opts.trace_objective = true;
    const double lambda = (0.02 + 0.05 * trial) * lambda_max(inst.design, inst.y, unit);
    const auto fit = fit_group_lasso(inst.design, inst.y, lambda, unit, opts);
    REQUIRE(fit.objective_trace.size() == static_cast<std::size_t>(fit.sweeps));
    for (std::size_t s = 1; s < fit.objective_trace.size(); ++s) {
      CHECK(fit.objective_trace[s] <= fit.objective_trace[s - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("the penalized minimizer beats random perturbations") {
  Philox rng(35);
  auto inst = random_instance(rng);
  const Weights w{{1.0, 0.5, 2.0, 1.0, 3.0}};
  const double lambda = 0.2 * lambda_max(inst.design, inst.y, w);
  SolverOptions opts;
  opts.tol = 1e-9;
  const auto fit = fit_group_lasso(inst.design, inst.y, lambda, w, opts);
  const double best = penalized_objective(inst.design, inst.y, lambda, w, fit.coefficients);
  for (int k = 0; k < 200; ++k) {
    Vector other = fit.coefficients;
    const double scale = (k % 2 ? 1e-3 : 1e-1);
    for (auto& v : other) v += scale * rng.normal();
    CHECK(penalized_objective(inst.design, inst.y, lambda, w, other) >= best);
  }
}

TEST_CASE("adaptive weights are reciprocal block norms") {
  Matrix X(5, 2);
  X << 0.0, 0.1, 0.2, 0.9, 0.5, 0.4, 0.7, 0.3, 1.0, 0.6;
  const auto design = build_design(X, make_spec(4, 4));
  Vector coef = Vector::Zero(9);
  coef.segment(1, 4) << 1, 1, 1, 1;
  const auto w = adaptive_weights(design, coef);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(std::isinf(w[1]));
  coef.segment(5, 4) << 2, 0, 0, 0;
  CHECK(adaptive_weights(design, coef)[1] == doctest::Approx(0.5));
}

TEST_CASE("path grid, warm starts and active sets") {
  Philox rng(36);
  auto inst = random_instance(rng);
  const auto unit = Weights::unit(inst.design.p());
  PathOptions opts;
  opts.count = 30;
  opts.min_ratio = 1e-2;
  opts.solver.tol = 1e-9;
  const auto path = solve_path(inst.design, inst.y, unit, opts);
  REQUIRE(path.size() == 30);
  CHECK(path.lambdas.front() == doctest::Approx(lambda_max(inst.design, inst.y, unit)));
  CHECK(path.lambdas.back() == doctest::Approx(1e-2 * path.lambdas.front()));
  CHECK(path.active_sets.front().empty());
  CHECK(path.all_converged());
  for (std::size_t k = 1; k < path.size(); ++k) CHECK(path.lambdas[k] < path.lambdas[k - 1]);

  const GroupLassoProblem problem(inst.design);
  for (std::size_t k : {5u, 15u, 29u}) {
    const auto cold = fit_group_lasso(problem, inst.y, path.lambdas[k], unit, opts.solver);
    CHECK((cold.coefficients - path.coefficients[k]).norm() < 1e-5);
  }

  PathOptions two;
  two.count = 2;
  two.min_ratio = 0.25;
  const auto ends = solve_path(inst.design, inst.y, unit, two);
  REQUIRE(ends.size() == 2);
  CHECK(ends.lambdas[1] == doctest::Approx(0.25 * ends.lambdas[0]));

  PathOptions bad;
  bad.count = 1;
  CHECK_THROWS_AS(solve_path(inst.design, inst.y, unit, bad), InvalidParameters);
  bad.count = 10;
  bad.min_ratio = 1.0;
  CHECK_THROWS_AS(solve_path(inst.design, inst.y, unit, bad), InvalidParameters);
}

TEST_CASE("degenerate paths collapse to a single intercept-only entry") {
  Philox rng(37);
  auto inst = random_instance(rng);
  const Weights none{std::vector<double>(5, kInfiniteWeight)};
  const auto path = solve_path(inst.design, inst.y, none);
  REQUIRE(path.size() == 1);
  CHECK(path.lambdas[0] == 0.0);
  CHECK(path.active_sets[0].empty());
  const auto flat = solve_path(inst.design, Vector::Constant(120, 2.0), Weights::unit(5));
  CHECK(flat.size() == 1);
}

TEST_CASE("select_admissible picks the explicit arg-min and filters by M") {
  std::vector<BICRecord> recs = {make_record(1.0, std::exp(3.2), 0.0, 0),
                                 make_record(0.5, std::exp(2.9), 0.0, 1),
                                 make_record(0.25, std::exp(3.0), 0.0, 2)};
  CHECK(select_admissible(recs, 5) == 1);
  std::vector<std::size_t> dropped;
  CHECK(select_admissible(recs, 0, &dropped) == 0);
  CHECK(dropped == std::vector<std::size_t>{1, 2});
  CHECK(select_admissible({recs[0]}, 5) == 0);
  recs[2] = make_record(0.25, std::exp(2.9), 0.0, 1);
  CHECK(select_admissible(recs, 5) == 1);  // tie: larger lambda wins
  std::vector<BICRecord> big = {make_record(1.0, 1.0, 0.0, 3)};
  CHECK_THROWS_AS(select_admissible(big, 2), NoAdmissibleEntry);
}

TEST_CASE("BIC(lambda) dominates the least-squares BIC on the same support") {
  Philox rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng);
    PathOptions opts;
    opts.count = 25;
    const auto path = solve_path(inst.design, inst.y, Weights::unit(5), opts);
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto lam = bic_lambda(inst.design, inst.y, path.coefficients[k], path.lambdas[k],
                                  PenaltySpec::semiparametric());
      const auto ls = bic_submodel(inst.design, inst.y, path.active_sets[k],
                                   PenaltySpec::semiparametric());
      CHECK(lam.criterion >= ls.criterion - 1e-12);
      CHECK(lam.rss >= ls.rss * (1 - 1e-12));
    }
  }
}

TEST_CASE("adaptive stage never resurrects a group dropped in stage one") {
  Philox rng(39);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng, 150, 8, 5, 1.0);
    const auto result = adaptive_group_lasso(inst.design, inst.y, PenaltySpec::semiparametric(), 5);
    const auto stage_one = result.initial_path.active_sets[result.initial.index];
    for (std::size_t k = 0; k < result.adaptive_path.size(); ++k) {
      CHECK(stage_one.includes(result.adaptive_path.active_sets[k]));
    }
    CHECK(result.selected.size() <= 5);
  }
}
