#include <benchmark/benchmark.h>

#include "liqd/diffseg.hpp"
#include "liqd/imaging.hpp"
#include "liqd/mlp.hpp"
#include "liqd/morphology.hpp"
#include "liqd/pipeline.hpp"
#include "liqd/random.hpp"
#include "liqd/synth.hpp"

using namespace liqd;

namespace {

Sequence bench_sequence() {
    SceneSpec spec;
    spec.seed = 42;
    Scenario sc;
    sc.frames = 2;
    sc.kind = LevelState::Rising;
    sc.level_start = 0.3;
    sc.level_end = 0.5;
    return render_sequence(spec, sc);
}

RasterImage noise_image(int w, int h, int channels, std::uint64_t seed) {
    SplitMix64 rng(seed);
    RasterImage img(w, h, channels);
    for (auto& v : img.data()) v = std::uint8_t(rng.below(256));
    return img;
}

}  // namespace

static void BM_Dilate(benchmark::State& state) {
    const Sequence seq = bench_sequence();
    const StructuringElement se = ellipse_se(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dilate(seq.masks[0], se));
}
BENCHMARK(BM_Dilate)->Arg(3)->Arg(5)->Arg(9);

static void BM_Compensate(benchmark::State& state) {
    const Sequence seq = bench_sequence();
    const BinaryMask broken = corrupt_mask(seq.masks[0], 10, 2, 2, 1);
    const StructuringElement se = ellipse_se(5);
    for (auto _ : state) benchmark::DoNotOptimize(compensate(broken, se));
}
BENCHMARK(BM_Compensate);

static void BM_Grayscale(benchmark::State& state) {
    const RasterImage img = noise_image(int(state.range(0)), int(state.range(0)) * 3 / 4, 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(to_grayscale(img));
    state.SetItemsProcessed(state.iterations() * std::int64_t(img.width()) * img.height());
}
BENCHMARK(BM_Grayscale)->Arg(128)->Arg(640);

static void BM_FrameDiff(benchmark::State& state) {
    const RasterImage a = noise_image(640, 480, 1, 3);
    const RasterImage b = noise_image(640, 480, 1, 4);
    const DiffParams params;
    for (auto _ : state) benchmark::DoNotOptimize(frame_diff(a, b, params));
}
BENCHMARK(BM_FrameDiff);

static void BM_Predict(benchmark::State& state) {
    const MlpModel model = MlpModel::initialize(kFeatureLength, 32, 5);
    FeatureVector f;
    SplitMix64 rng(6);
    for (auto& v : f.values) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(predict(model, f.span()));
}
BENCHMARK(BM_Predict);

static void BM_PipelinePair(benchmark::State& state) {
    const Sequence seq = bench_sequence();
    const PipelineConfig config;
    const PairClassifier classifier;
    for (auto _ : state) {
        const PreparedFrame prev = prepare_frame(seq.frames[0], seq.masks[0], config);
        const PreparedFrame curr = prepare_frame(seq.frames[1], seq.masks[1], config);
        benchmark::DoNotOptimize(classifier.classify(analyze_pair(prev, curr, config.diff)));
    }
}
BENCHMARK(BM_PipelinePair);
BENCHMARK_MAIN();
