// Serial reference vs OpenMP kernel for every parallel path in the library.
// Run with --benchmark_filter to pick one pair; set OMP_NUM_THREADS to vary
// the thread count.

#include <benchmark/benchmark.h>

#include "codemix/eval.hpp"
#include "codemix/features.hpp"
#include "codemix/mlp.hpp"
#include "codemix/model.hpp"
#include "codemix/translit.hpp"
#include "fixtures.hpp"

using namespace codemix;

namespace {

std::vector<std::string> texts(std::size_t n) {
  Rng rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t = testing::random_roman_word(rng);
    for (std::size_t w = 4 + rng.below(12); w > 0; --w) {
      t += " " + testing::random_roman_word(rng);
    }
    out.push_back(t);
  }
  return out;
}

Corpus corpus_of(const std::vector<std::string>& ts) {
  Corpus c;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    c.samples.push_back({i, ts[i], kAllLabels[i % kNumLabels], Language::Kannada,
                         Provenance::Original});
  }
  return c;
}

template <bool Parallel>
void BM_Featurize(benchmark::State& state) {
  const auto ts = texts(state.range(0));
  for (auto _ : state) {
    auto v = Parallel ? featurize_batch(ts, FeatureSpace{})
                      : featurize_batch_serial(ts, FeatureSpace{});
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Transliterate(benchmark::State& state) {
  const Corpus c = corpus_of(texts(state.range(0)));
  const RuleTable t = RuleTable::default_for(Language::Kannada);
  const CharLM lm = CharLM::train(lm_training_lines(c, t), 3, 0.1);
  for (auto _ : state) {
    Corpus out = Parallel ? transliterate_corpus(c, t, lm)
                          : transliterate_corpus_serial(c, t, lm);
    benchmark::DoNotOptimize(out.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_PredictMLP(benchmark::State& state) {
  const auto ts = texts(state.range(0));
  const Model m = init_mlp(FeatureSpace{}, 32, 64, 0.5, 3);
  for (auto _ : state) {
    auto labels = Parallel ? predict_batch(m, ts) : predict_batch_serial(m, ts);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Adam(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng(2);
  std::vector<double> p(n), g(n), m(n), v(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-1, 1);
  std::uint64_t t = 0;
  for (auto _ : state) {
    ++t;
    if (Parallel) {
      adam_update(p, g, m, v, t, AdamHyper{});
    } else {
      adam_update_serial(p, g, m, v, t, AdamHyper{});
    }
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Confusion(benchmark::State& state) {
  Rng rng(3);
  std::vector<Label> gold(state.range(0)), pred(state.range(0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    gold[i] = kAllLabels[rng.below(5)];
    pred[i] = kAllLabels[rng.below(5)];
  }
  for (auto _ : state) {
    auto m = Parallel ? confusion_matrix_parallel(gold, pred)
                      : confusion_matrix(gold, pred);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Featurize<false>)->Name("featurize/serial")->Arg(2000);
BENCHMARK(BM_Featurize<true>)->Name("featurize/omp")->Arg(2000)->UseRealTime();
BENCHMARK(BM_Transliterate<false>)->Name("translit/serial")->Arg(500);
BENCHMARK(BM_Transliterate<true>)->Name("translit/omp")->Arg(500)->UseRealTime();
BENCHMARK(BM_PredictMLP<false>)->Name("predict_mlp/serial")->Arg(2000);
BENCHMARK(BM_PredictMLP<true>)->Name("predict_mlp/omp")->Arg(2000)->UseRealTime();
BENCHMARK(BM_Adam<false>)->Name("adam/serial")->Arg(1 << 20);
BENCHMARK(BM_Adam<true>)->Name("adam/omp")->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Confusion<false>)->Name("confusion/serial")->Arg(1 << 20);
BENCHMARK(BM_Confusion<true>)->Name("confusion/omp")->Arg(1 << 20)->UseRealTime();

BENCHMARK_MAIN();
