// Serial reference kernels against their OpenMP counterparts.
//
//   ./build/bench/textaug_bench --benchmark_filter=Gradient
//   OMP_NUM_THREADS=8 ./build/bench/textaug_bench

#include <benchmark/benchmark.h>

#include <algorithm>
#include <string>
#include <vector>

#include "textaug/kernels.hpp"
#include "textaug/rng.hpp"

namespace {

using namespace textaug;
using namespace textaug::kernels;

struct Problem {
  CsrMatrix x;
  LabelMatrix y;
  std::vector<double> w, b;
};

Problem make_problem(std::size_t rows, std::size_t vocab, std::size_t labels, std::size_t nnz_per_row) {
  Rng rng(42);
  Problem p;
  p.x.cols = vocab;
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < rows; ++i) {
    cols.clear();
    vals.clear();
    const auto picks = rng.sample_indices(vocab, nnz_per_row);
    for (auto c : picks) cols.push_back(static_cast<std::uint32_t>(c));
    std::sort(cols.begin(), cols.end());
    for (std::size_t k = 0; k < cols.size(); ++k) vals.push_back(rng.unit());
    p.x.append_row(cols, vals);
  }
  p.y = LabelMatrix(rows, labels);
  for (auto& v : p.y.data) v = rng.unit() < 0.1 ? 1 : 0;
  p.w.resize(labels * vocab);
  for (auto& v : p.w) v = rng.unit() - 0.5;
  p.b.assign(labels, 0.0);
  return p;
}

const Problem& problem() {
  static const Problem p = make_problem(4000, 6000, 28, 24);
  return p;
}

template <auto Kernel>
void BM_Gradient(benchmark::State& state) {
  const auto& p = problem();
  LossGradient g;
  for (auto _ : state) {
    Kernel(p.x, p.y, p.w, p.b, 1e-4, g);
    benchmark::DoNotOptimize(g.loss.data());
  }
}

template <auto Kernel>
void BM_Scores(benchmark::State& state) {
  const auto& p = problem();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(p.x, p.y.cols, p.w, p.b));
}

std::vector<std::string> make_sentences(std::size_t n, std::uint64_t seed) {
  static const char* words[] = {"the", "dog", "was", "very", "happy", "sad", "about", "news", "today", "and",
                                "i", "feel", "so", "proud", "relieved", "nervous", "of", "my", "friend", "again"};
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const auto len = 6 + rng.below(20);
    for (std::size_t k = 0; k < len; ++k) {
      if (k) s += ' ';
      s += words[rng.below(std::size(words))];
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <auto Kernel>
void BM_ScorePairs(benchmark::State& state) {
  static const auto refs = make_sentences(8000, 1);
  static const auto gens = make_sentences(8000, 2);
  std::vector<SentencePairView> views;
  for (std::size_t i = 0; i < refs.size(); ++i) views.push_back({&refs[i], &gens[i]});
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(views));
}

BENCHMARK(BM_Gradient<serial::logistic_loss_gradient>)->Name("Gradient/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient<parallel::logistic_loss_gradient>)
    ->Name("Gradient/parallel")
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Scores<serial::logistic_scores>)->Name("Scores/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scores<parallel::logistic_scores>)->Name("Scores/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScorePairs<serial::score_pairs>)->Name("ScorePairs/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScorePairs<parallel::score_pairs>)
    ->Name("ScorePairs/parallel")
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
