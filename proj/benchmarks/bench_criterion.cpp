#include <benchmark/benchmark.h>

#include <permreg/criterion.hpp>
#include <permreg/data.hpp>
#include <permreg/optimizer.hpp>

using namespace permreg;

namespace {

Dataset standardized_scenario(std::size_t n, std::size_t p) {
    ScenarioConfig cfg;
    cfg.scenario = Scenario::B;
    cfg.n_train = n;
    cfg.n_test = 2;
    cfg.p = p;
    cfg.seed = 7;
    const Dataset raw = generate_scenario(cfg).train;
    return standardize(raw).first;
}

void BM_RidgeFit(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const Dataset data = standardized_scenario(200, p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(beta_ridge(10.0, data.X, data.Y));
    }
}
BENCHMARK(BM_RidgeFit)->Arg(20)->Arg(80)->Arg(200);

// Criterion evaluation cost versus T: the factorization is shared across the
// T+1 terms, so time should grow well below linearly at small T.
void BM_CriterionEvaluation(benchmark::State& state) {
    const auto T = static_cast<std::size_t>(state.range(0));
    const Dataset data = standardized_scenario(200, 100);
    CriterionSpec spec;
    spec.family = FamilyTag::SparseRidge;
    spec.perms = make_permutations(200, T, 3);
    const RegParams theta = default_params(100);
    for (auto _ : state) {
        benchmark::DoNotOptimize(criterion_gradient(spec, theta, data.X, data.Y));
    }
}
BENCHMARK(BM_CriterionEvaluation)->Arg(0)->Arg(15)->Arg(30)->Arg(60);

void BM_Train(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.scenario = Scenario::B;
    cfg.seed = 5;
    const ScenarioData data = generate_scenario(cfg);
    const AdamConfig adam;
    const auto family = static_cast<FamilyTag>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(family, data.train.X, data.train.Y, adam, 30, 5));
    }
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(FamilyTag::Ridge))
    ->Arg(static_cast<int>(FamilyTag::SparseRidge))
    ->Arg(static_cast<int>(FamilyTag::Aggregated))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
