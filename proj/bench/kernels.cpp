// Serial reference versus OpenMP kernel, one pair per parallel hot path.
// Arg(0) is the serial reference; Arg(t) runs the parallel kernel on t threads.
#include "mgt/embeddings.hpp"
#include "mgt/models.hpp"
#include "mgt/pipeline.hpp"
#include "mgt/stylometry.hpp"
#include "mgt/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

#include <algorithm>
#include <random>

namespace {

using namespace mgt;

const Corpus& bench_corpus() {
    static const Corpus corpus = [] {
        SyntheticConfig sc;
        sc.docs_per_language = 1000;
        sc.seed = 7;
        return synthetic_corpus(sc);
    }();
    return corpus;
}

struct Problem {
    FeatureMatrix x;
    std::vector<std::uint32_t> y;
};

const Problem& dense_problem() {
    static const Problem p = [] {
        std::mt19937_64 gen(3);
        std::normal_distribution<double> g(0.0, 1.0);
        Problem out;
        for (std::size_t i = 0; i < 20000; ++i) {
            std::vector<double> row(32);
            for (auto& v : row) {
                v = g(gen);
            }
            const auto label = static_cast<std::uint32_t>(i % 3);
            row[label] += 1.0;
            out.x.push_row(row);
            out.y.push_back(label);
        }
        return out;
    }();
    return p;
}

void apply_threads(benchmark::State& state) {
    state.counters["threads"] = static_cast<double>(state.range(0));
}

void thread_args(benchmark::internal::Benchmark* b) {
    const int max = std::max(2, omp_get_max_threads());
    b->Arg(0);
    for (int t = 1; t <= max; t *= 2) {
        b->Arg(t);
    }
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_feature_rows(benchmark::State& state) {
    const auto& docs = bench_corpus().documents;
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto rows = threads == 0 ? feature_rows_serial(docs, PreprocessMode::unicode_letters)
                                 : feature_rows(docs, PreprocessMode::unicode_letters, threads);
        benchmark::DoNotOptimize(rows.data());
    }
    apply_threads(state);
}
BENCHMARK(BM_feature_rows)->Apply(thread_args);

void BM_find_level_splits(benchmark::State& state) {
    const auto& p = dense_problem();
    const SortedColumns sorted(p.x);
    const std::size_t n = p.x.rows();
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> grad(n);
    std::vector<double> hess(n, 0.25);
    std::vector<std::int32_t> slot(n);
    std::vector<double> node_g(4, 0.0);
    std::vector<double> node_h(4, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = u(gen);
        slot[i] = static_cast<std::int32_t>(i % 4);
        node_g[i % 4] += grad[i];
        node_h[i % 4] += hess[i];
    }
    LevelSplitInput in;
    in.x = &p.x;
    in.sorted = &sorted;
    in.node_of_row = slot;
    in.grad = grad;
    in.hess = hess;
    in.node_g = node_g;
    in.node_h = node_h;
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto splits = threads == 0 ? find_level_splits_serial(in) : find_level_splits(in, threads);
        benchmark::DoNotOptimize(splits.data());
    }
    apply_threads(state);
}
BENCHMARK(BM_find_level_splits)->Apply(thread_args);

void BM_predict_batch(benchmark::State& state) {
    const auto& p = dense_problem();
    static const Classifier model = [&] {
        GbdtConfig cfg;
        cfg.rounds = 30;
        cfg.max_depth = 6;
        return Classifier{train_gbdt(p.x, p.y, {"a", "b", "c"}, cfg)};
    }();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto preds = threads == 0 ? predict_batch_serial(model, p.x) : predict_batch(model, p.x, threads);
        benchmark::DoNotOptimize(preds.data());
    }
    apply_threads(state);
}
BENCHMARK(BM_predict_batch)->Apply(thread_args);

void BM_featurize(benchmark::State& state) {
    static const TrainedPipeline pipeline = [] {
        PipelineConfig cfg;
        cfg.embedding.dim = 32;
        cfg.embedding.bucket_count = 100000;
        cfg.embedding.epochs = 1;
        cfg.train.linear.epochs = 5;
        cfg.set_seed(1);
        return TrainedPipeline::train(bench_corpus(), cfg);
    }();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto x = threads == 0 ? pipeline.featurize_serial(bench_corpus()) : pipeline.featurize(bench_corpus(), threads);
        benchmark::DoNotOptimize(x.data().data());
    }
    apply_threads(state);
}
BENCHMARK(BM_featurize)->Apply(thread_args);

// Embedding training has no separate serial function: one worker is the reference path.
void BM_train_embeddings(benchmark::State& state) {
    EmbeddingConfig cfg;
    cfg.dim = 32;
    cfg.bucket_count = 100000;
    cfg.epochs = 1;
    const int workers = std::max<int>(1, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto model = train_embeddings(bench_corpus(), cfg, workers);
        benchmark::DoNotOptimize(model.input_matrix().data());
    }
    apply_threads(state);
}
BENCHMARK(BM_train_embeddings)->Apply(thread_args);

} // namespace

BENCHMARK_MAIN();
