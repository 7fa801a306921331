#include "aigiqa/encoder.hpp"
#include "aigiqa/prompt_model.hpp"
#include "aigiqa/synthetic.hpp"
#include "aigiqa/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace aigiqa;

namespace {

std::shared_ptr<const DualEncoder> encoder() {
    static const auto enc = make_encoder("ViT-B/16", {true, ""});
    return enc;
}

std::vector<Vector> image_features(int n) {
    std::vector<Vector> out;
    for (int i = 0; i < n; ++i) out.push_back(encode_image(random_pixel_tensor(static_cast<std::uint64_t>(i)), *encoder()));
    return out;
}

void BM_TextFeatures(benchmark::State & state) {
    const auto model = QualityModel::initialize(encoder(), ModelConfig{}, 0);
    for (auto _ : state) benchmark::DoNotOptimize(model.text_features());
}

void BM_ImageFeature(benchmark::State & state) {
    const PixelTensor img = random_pixel_tensor(1);
    for (auto _ : state) benchmark::DoNotOptimize(encode_image(img, *encoder()));
}

void BM_Predict(benchmark::State & state) {
    const auto model = QualityModel::initialize(encoder(), ModelConfig{}, 0);
    const auto feats = image_features(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(model.predict(feats));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrainStep(benchmark::State & state) {
    ExperimentConfig cfg;
    const Trainer trainer(encoder(), cfg);
    const auto feats = image_features(static_cast<int>(state.range(0)));
    std::vector<double> targets(feats.size());
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = static_cast<double>(i % 10) / 10.0;
    TrainState s = trainer.initial_state();
    for (auto _ : state) benchmark::DoNotOptimize(trainer.step(s, feats, targets, 1e-4, {}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EncoderHash(benchmark::State & state) {
    for (auto _ : state) benchmark::DoNotOptimize(encoder()->parameter_hash());
}

} // namespace

BENCHMARK(BM_TextFeatures)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ImageFeature)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Predict)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncoderHash)->Unit(benchmark::kMillisecond);
