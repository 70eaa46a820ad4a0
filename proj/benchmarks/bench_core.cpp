#include <benchmark/benchmark.h>

#include <numbers>

#include "bellbound/bell.hpp"
#include "bellbound/optimizer.hpp"
#include "bellbound/state_family.hpp"

namespace {

using namespace bellbound;
constexpr double kPi = std::numbers::pi;
const FamilyAngles kAngles{kPi / 12, kPi / 4, 5 * kPi / 12};
const MeasurementAngles kTheta{2 * kPi / 9, -4 * kPi / 9};

FamilyState main_state() { return assemble_state(kAngles, solve_omega(kAngles).branches[0]); }

void BM_SolveOmega(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_omega(kAngles));
}
BENCHMARK(BM_SolveOmega);

void BM_AssembleState(benchmark::State& state) {
  const double omega = solve_omega(kAngles).branches[0];
  for (auto _ : state) benchmark::DoNotOptimize(assemble_state(kAngles, omega));
}
BENCHMARK(BM_AssembleState);

void BM_EigHermitian(benchmark::State& state) {
  const ComplexMatrix rho = partial_transpose(main_state().rho.matrix(), Party::A);
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(rho));
}
BENCHMARK(BM_EigHermitian);

void BM_Certify(benchmark::State& state) {
  const FamilyState s = main_state();
  for (auto _ : state) benchmark::DoNotOptimize(certify(s));
}
BENCHMARK(BM_Certify);

void BM_CorrelationTensor(benchmark::State& state) {
  const FamilyState s = main_state();
  for (auto _ : state) benchmark::DoNotOptimize(correlation_tensor(s.rho, kTheta));
}
BENCHMARK(BM_CorrelationTensor);

void BM_Objective(benchmark::State& state) {
  const SearchParameters x{kAngles.alpha, kAngles.beta, kAngles.gamma, kTheta.theta1, kTheta.theta2};
  for (auto _ : state) benchmark::DoNotOptimize(objective(x));
}
BENCHMARK(BM_Objective);

void BM_LocalBound(benchmark::State& state) {
  const BellExpression expr = BellExpression::sliwa5();
  for (auto _ : state) benchmark::DoNotOptimize(local_bound(expr));
}
BENCHMARK(BM_LocalBound);

void BM_Maximize(benchmark::State& state) {
  MaximizeConfig cfg;
  cfg.starts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(maximize(cfg, 1));
}
BENCHMARK(BM_Maximize)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
