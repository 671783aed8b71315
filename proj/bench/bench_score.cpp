#include "hiercode/block_index.hpp"
#include "hiercode/similarity.hpp"
#include "hiercode/synth.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace hiercode;

struct Fixture {
    Codebook codebook;
    Frames frames;
};

const Fixture& fixture() {
    static const Fixture f = [] {
        Codebook cb = build_codebook(synthetic_charset({40, 2000, 3, 7}), CodeParams{}, 7);
        SynthConfig noise;
        noise.noise_sigma = 0.5;
        std::mt19937_64 rng(11);
        Frames frames(cb.code_length(), 0);
        for (std::size_t i = 0; i < 64; ++i) {
            frames.push_back(std::span<const double>(noisy_frame(cb.row(i * 31 % cb.size()), noise, rng)));
        }
        return Fixture{std::move(cb), std::move(frames)};
    }();
    return f;
}

void BM_ScoreSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(score_serial(f.codebook, f.frames));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.frames.count()));
}
BENCHMARK(BM_ScoreSerial)->Unit(benchmark::kMillisecond);

void BM_ScoreParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(score(f.codebook, f.frames));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.frames.count()));
}
BENCHMARK(BM_ScoreParallel)->Unit(benchmark::kMillisecond);

void BM_DecodeDense(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        for (std::size_t w = 0; w < f.frames.count(); ++w) benchmark::DoNotOptimize(decode_frame(f.codebook, f.frames.frame(w)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.frames.count()));
}
BENCHMARK(BM_DecodeDense)->Unit(benchmark::kMillisecond);

void BM_DecodeBlockIndex(benchmark::State& state) {
    const Fixture& f = fixture();
    const BlockIndex index(f.codebook);
    for (auto _ : state) {
        for (std::size_t w = 0; w < f.frames.count(); ++w) benchmark::DoNotOptimize(index.decode(f.frames.frame(w)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.frames.count()));
}
BENCHMARK(BM_DecodeBlockIndex)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
