#include <random>

#include <benchmark/benchmark.h>

#include "rarequant/calibration.hpp"
#include "rarequant/ensemble.hpp"
#include "rarequant/synth.hpp"

namespace {

using namespace rarequant;

const SynthCorpus& corpus() {
    static const SynthCorpus c = [] {
        SynthConfig cfg;
        cfg.seed = 1;
        cfg.separation = 1.3;
        cfg.target_size = 5000;
        return generate(cfg);
    }();
    return c;
}

std::vector<double> mixture_scores(std::size_t n) {
    std::mt19937_64 rng(3);
    std::gamma_distribution<double> g5(5.0), g1(1.0);
    std::bernoulli_distribution coin(0.05);
    std::vector<double> s(n);
    for (auto& v : s) {
        const double a = g5(rng), b = g1(rng);
        v = coin(rng) ? a / (a + b) : b / (a + b);
    }
    return s;
}

void BM_Vectorize(benchmark::State& state) {
    const auto& docs = corpus().target;
    const VectorizerConfig cfg;
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vectorize(docs[i++ % docs.size()], cfg));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Vectorize);

void BM_Train(benchmark::State& state) {
    const auto& train_set = corpus().train;
    const auto x = vectorize_all(train_set.documents(), VectorizerConfig{});
    const auto y = train_set.labels();
    TrainConfig cfg;
    cfg.max_iters = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train(x, y, cfg));
}
BENCHMARK(BM_Train)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_BuildMember(benchmark::State& state) {
    const auto prepared = PreparedCorpus::from(corpus().train, VectorizerConfig{});
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(build_member(prepared, PipelineConfig{}, seed++));
}
BENCHMARK(BM_BuildMember)->Unit(benchmark::kMillisecond);

const ScoreDensityPair kDensities{{5, 1}, {1, 5}, 100, 100};

void BM_EstimateEm(benchmark::State& state) {
    const auto s = mixture_scores(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_prevalence_em(kDensities, s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateEm)->Arg(5000)->Arg(20000);

void BM_EstimateBayes(benchmark::State& state) {
    const auto s = mixture_scores(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_prevalence_bayes(kDensities, s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateBayes)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
