#include <benchmark/benchmark.h>

#include "herglotz/dynamics.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/parse.hpp"
#include "herglotz/unified.hpp"

using namespace herglotz;

namespace {

ContactLagrangian make(int n, int k, const std::string& text, const ParamValues& params) {
  std::set<std::string> names;
  for (const auto& [p, v] : params) names.insert(p);
  return ContactLagrangian(n, k, parse(text, ParseContext::lagrangian(n, k, names)), params);
}

const char* kPU = "(q0_1^2 - w^2*q0_0^2 - lam*q0_2^2)/2 - gam*z";

ContactLagrangian pais_uhlenbeck() { return make(1, 2, kPU, {{"w", 1.0}, {"lam", 0.1}, {"gam", 0.2}}); }

ContactLagrangian electron() {
  return make(3, 2, "m*tau^2/32*(q0_2^2 + q1_2^2 + q2_2^2) + (q0_0^2 + q1_0^2 + q2_0^2)/2 + 4/tau*z",
              {{"m", 1.0}, {"tau", 0.5}});
}

ContactLagrangian singular() {
  return make(1, 2, "m*q0_1^2/2 - kappa*q0_0^2/2 - gam*q0_2*z", {{"m", 1.0}, {"kappa", 1.0}, {"gam", 0.3}});
}

}  // namespace

static void BM_ParseSimplify(benchmark::State& state) {
  const auto ctx = ParseContext::lagrangian(1, 2, {"w", "lam", "gam"});
  for (auto _ : state) benchmark::DoNotOptimize(simplify(parse(kPU, ctx)));
}
BENCHMARK(BM_ParseSimplify);

static void BM_MomentaPU(benchmark::State& state) {
  const auto m = pais_uhlenbeck();
  for (auto _ : state) benchmark::DoNotOptimize(momenta(m));
}
BENCHMARK(BM_MomentaPU);

static void BM_EquationsElectron(benchmark::State& state) {
  const auto m = electron();
  for (auto _ : state) benchmark::DoNotOptimize(herglotz_equations(m));
}
BENCHMARK(BM_EquationsElectron);

static void BM_ConstraintAlgorithm(benchmark::State& state) {
  const auto m = state.range(0) == 0 ? pais_uhlenbeck() : singular();
  const auto u = build_unified(m);
  for (auto _ : state) benchmark::DoNotOptimize(constraint_algorithm(u, ChainMode::HolonomyFirst));
  state.SetLabel(state.range(0) == 0 ? "pais-uhlenbeck" : "singular");
}
BENCHMARK(BM_ConstraintAlgorithm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_RK4PaisUhlenbeck(benchmark::State& state) {
  const auto m = pais_uhlenbeck();
  const NumericField f(lagrangian_vector_field(m), m.parameter_point());
  IntegrateOptions o;
  o.h = 1e-3;
  const double t1 = static_cast<double>(state.range(0)) * 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, {1.0, 0.0, 0.0, 0.0, 0.0}, 0.0, t1, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RK4PaisUhlenbeck)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Equivalent(benchmark::State& state) {
  const auto m = pais_uhlenbeck();
  const Expr a = herglotz_equations(m)[0];
  const Expr b = simplify(a * 2 - a);
  for (auto _ : state) benchmark::DoNotOptimize(equivalent(a, b));
}
BENCHMARK(BM_Equivalent);
BENCHMARK_MAIN();
