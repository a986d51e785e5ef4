#include <benchmark/benchmark.h>

#include "addsel/basis.hpp"
#include "addsel/group_lasso.hpp"
#include "addsel/subset_search.hpp"
#include "support.hpp"

namespace {

using namespace addsel;

void BM_EvalRawBasis(benchmark::State& state) {
  const auto spec = make_spec(4, static_cast<int>(state.range(0)));
  Vector out(spec.raw_size());
  double x = 0.0;
  for (auto _ : state) {
    eval_raw_basis_into(spec, x, out);
    benchmark::DoNotOptimize(out.data());
    x += 0.000731;
    if (x > 1.0) x -= 1.0;
  }
}
BENCHMARK(BM_EvalRawBasis)->Arg(5)->Arg(20);

void BM_BuildDesign(benchmark::State& state) {
  Philox rng(stream_key(1, 0));
  const Matrix X = testing::random_unit_matrix(state.range(0), 50, rng);
  const auto spec = make_spec(4, 7);
  for (auto _ : state) benchmark::DoNotOptimize(build_design(X, spec));
}
BENCHMARK(BM_BuildDesign)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveSearch(benchmark::State& state) {
  Philox rng(stream_key(2, 0));
  const Matrix X = testing::random_unit_matrix(200, state.range(0), rng);
  const auto design = build_design(X, make_spec(4, 5));
  const Vector y = testing::two_component_response(X, 1.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exhaustive_select(design, y, 3, PenaltySpec::semiparametric()));
  }
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GroupLassoPath(benchmark::State& state) {
  Philox rng(stream_key(3, 0));
  const Matrix X = testing::random_unit_matrix(state.range(0), 50, rng);
  const auto design = build_design(X, make_spec(4, 7));
  const Vector y = testing::two_component_response(X, 1.0, rng);
  const GroupLassoProblem problem(design);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_path(problem, y, Weights::unit(50)));
  }
}
BENCHMARK(BM_GroupLassoPath)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
